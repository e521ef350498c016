#include "got/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace got {

double reflect_into_box(double x, double bound) {
  if (x >= -bound && x <= bound) return x;
  const double period = 4.0 * bound;
  double y = std::fmod(x + bound, period);
  if (y < 0) y += period;
  if (y > 2.0 * bound) y = period - y;
  return y - bound;
}

OptimResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                        const Eigen::VectorXd& start, double bound,
                        const NelderMeadOptions& options) {
  using Eigen::VectorXd;
  const Eigen::Index n = start.size();
  OptimResult result;

  auto into_box = [bound](VectorXd x) {
    for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = reflect_into_box(x[k], bound);
    return x;
  };
  auto eval = [&](const VectorXd& x) {
    ++result.evaluations;
    const double v = objective(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<VectorXd> simplex;
  std::vector<double> values;
  simplex.push_back(into_box(start));
  values.push_back(eval(simplex[0]));
  for (Eigen::Index k = 0; k < n; ++k) {
    VectorXd v = simplex[0];
    v[k] += (v[k] + options.initial_step <= bound) ? options.initial_step : -options.initial_step;
    simplex.push_back(into_box(v));
    values.push_back(eval(simplex.back()));
  }

  std::vector<std::size_t> order(n + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<VectorXd> s2;
    std::vector<double> v2;
    for (std::size_t i : order) {
      s2.push_back(simplex[i]);
      v2.push_back(values[i]);
    }
    simplex = std::move(s2);
    values = std::move(v2);
  };

  const double tol = options.tolerance;
  for (result.iterations = 0; result.iterations < options.max_iterations; ++result.iterations) {
    sort_simplex();
    double diameter = 0.0;
    for (Eigen::Index i = 1; i <= n; ++i)
      diameter = std::max(diameter, (simplex[i] - simplex[0]).cwiseAbs().maxCoeff());
    const double spread = values[n] - values[0];
    if (diameter <= tol && spread <= tol * (1.0 + std::abs(values[0]))) {
      result.converged = true;
      break;
    }

    VectorXd centroid = VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) centroid += simplex[i];
    centroid /= static_cast<double>(n);

    const VectorXd& worst = simplex[n];
    const VectorXd reflected = into_box(centroid + (centroid - worst));
    const double f_r = eval(reflected);
    if (f_r < values[0]) {
      const VectorXd expanded = into_box(centroid + 2.0 * (centroid - worst));
      const double f_e = eval(expanded);
      if (f_e < f_r) {
        simplex[n] = expanded;
        values[n] = f_e;
      } else {
        simplex[n] = reflected;
        values[n] = f_r;
      }
      continue;
    }
    if (f_r < values[n - 1]) {
      simplex[n] = reflected;
      values[n] = f_r;
      continue;
    }
    const bool outside = f_r < values[n];
    const VectorXd contracted =
        outside ? into_box(centroid + 0.5 * (reflected - centroid))
                : into_box(centroid + 0.5 * (worst - centroid));
    const double f_c = eval(contracted);
    if (f_c < (outside ? f_r : values[n])) {
      simplex[n] = contracted;
      values[n] = f_c;
      continue;
    }
    for (Eigen::Index i = 1; i <= n; ++i) {
      simplex[i] = into_box(simplex[0] + 0.5 * (simplex[i] - simplex[0]));
      values[i] = eval(simplex[i]);
    }
  }
  sort_simplex();
  result.x = simplex[0];
  result.value = values[0];
  return result;
}

}  // namespace got
