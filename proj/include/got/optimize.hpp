#pragma once

#include <functional>

#include <Eigen/Core>

namespace got {

struct NelderMeadOptions {
  double tolerance = 1e-6;  // both simplex diameter and value spread
  int max_iterations = 500;
  double initial_step = 0.3;
};

struct OptimResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Mirror x back into [-bound, bound].
double reflect_into_box(double x, double bound);

/// Nelder-Mead over the box [-bound, bound]^n; trial points are reflected
/// into the box. NaN objective values are treated as +inf.
OptimResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                        const Eigen::VectorXd& start, double bound,
                        const NelderMeadOptions& options = {});

}  // namespace got
