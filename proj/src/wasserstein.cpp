#include "got/wasserstein.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "got/isotonic.hpp"

namespace got {

namespace wasserstein {

Vector extended_knots(const Vector& q, Support s) {
  const Eigen::Index m = q.size();
  Vector ext(m + 2);
  ext.segment(1, m) = q;
  if (m == 1) {
    ext[0] = q[0];
    ext[m + 1] = q[0];
  } else {
    ext[0] = std::min(q[0], std::max(s.lower, q[0] - 0.5 * (q[1] - q[0])));
    ext[m + 1] = std::max(q[m - 1], std::min(s.upper, q[m - 1] + 0.5 * (q[m - 1] - q[m - 2])));
  }
  return ext;
}

Vector extended_levels(Eigen::Index m) {
  Vector lv(m + 2);
  lv[0] = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) lv[k + 1] = (static_cast<double>(k) + 0.5) / static_cast<double>(m);
  lv[m + 1] = 1.0;
  return lv;
}

}  // namespace wasserstein

namespace {

void check_support(Support s) {
  if (!(s.upper > s.lower) || !std::isfinite(s.lower) || !std::isfinite(s.upper))
    throw UsageError("support interval must have strictly positive finite length");
}

Vector clamp_to(const Vector& v, Support s) { return v.cwiseMax(s.lower).cwiseMin(s.upper); }

Vector project_values(const Vector& v, Support s) { return clamp_to(enforce_monotone(v), s); }

MonotoneMap map_between(const Vector& a, const Vector& b, Support s) {
  return MonotoneMap(wasserstein::extended_knots(a, s), wasserstein::extended_knots(b, s), s);
}

}  // namespace

QuantileGrid::QuantileGrid(Vector values, Support support)
    : values_(std::move(values)), support_(support) {
  check_support(support_);
  if (values_.size() < 1) throw GeometryError("quantile grid must have at least one level");
  constexpr double tol = 1e-10;
  for (Eigen::Index k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k])) throw GeometryError("quantile grid contains non-finite values");
    if (values_[k] < support_.lower - tol || values_[k] > support_.upper + tol)
      throw GeometryError("quantile value outside the support");
    if (k > 0 && values_[k] < values_[k - 1] - tol)
      throw GeometryError("quantile values must be non-decreasing");
  }
}

MonotoneMap::MonotoneMap(Vector knots_x, Vector knots_y, Support support)
    : knots_x_(std::move(knots_x)), knots_y_(std::move(knots_y)), support_(support) {
  if (knots_x_.size() != knots_y_.size() || knots_x_.size() < 1)
    throw UsageError("monotone map needs matching, non-empty knot vectors");
  const Eigen::Index n = knots_x_.size();
  if (n >= 2) {
    const double dx0 = knots_x_[1] - knots_x_[0];
    if (dx0 > 0) left_slope_ = (knots_y_[1] - knots_y_[0]) / dx0;
    const double dx1 = knots_x_[n - 1] - knots_x_[n - 2];
    if (dx1 > 0) right_slope_ = (knots_y_[n - 1] - knots_y_[n - 2]) / dx1;
  }
}

MonotoneMap MonotoneMap::identity(Support support) {
  Vector k(2);
  k << support.lower, support.upper;
  return MonotoneMap(k, k, support);
}

double MonotoneMap::below(double x) const { return knots_y_[0] + left_slope_ * (x - knots_x_[0]); }

double MonotoneMap::above(double x) const {
  const Eigen::Index n = knots_x_.size();
  return knots_y_[n - 1] + right_slope_ * (x - knots_x_[n - 1]);
}

double MonotoneMap::operator()(double x) const {
  const Eigen::Index n = knots_x_.size();
  const double* begin = knots_x_.data();
  const Eigen::Index j = std::lower_bound(begin, begin + n, x) - begin;
  if (j == n) return above(x);
  if (knots_x_[j] == x) return knots_y_[j];
  if (j == 0) return below(x);
  const double lam = (x - knots_x_[j - 1]) / (knots_x_[j] - knots_x_[j - 1]);
  return knots_y_[j - 1] + lam * (knots_y_[j] - knots_y_[j - 1]);
}

Vector MonotoneMap::evaluate_sorted(const Vector& xs) const {
  const Eigen::Index n = knots_x_.size();
  const double* kx = knots_x_.data();
  const double* ky = knots_y_.data();
  Vector out(xs.size());
  Eigen::Index j = 0;
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    while (j < n && kx[j] < x) ++j;
    if (j == n) {
      out[i] = above(x);
    } else if (kx[j] == x) {
      out[i] = ky[j];
    } else if (j == 0) {
      out[i] = below(x);
    } else {
      const double lam = (x - kx[j - 1]) / (kx[j] - kx[j - 1]);
      out[i] = ky[j - 1] + lam * (ky[j] - ky[j - 1]);
    }
  }
  return out;
}

Vector MonotoneMap::sample(int points) const {
  if (points < 2) throw UsageError("monotone map sampling needs at least two points");
  Vector xs(points);
  for (int k = 0; k < points; ++k)
    xs[k] = support_.lower + support_.width() * static_cast<double>(k) / (points - 1);
  return evaluate_sorted(xs).cwiseMax(support_.lower).cwiseMin(support_.upper);
}

MonotoneMap MonotoneMap::inverse() const { return MonotoneMap(knots_y_, knots_x_, support_); }

namespace wasserstein {

Vector levels(int grid_size) {
  if (grid_size < 1) throw UsageError("grid size must be >= 1");
  Vector lv(grid_size);
  for (int k = 0; k < grid_size; ++k) lv[k] = (k + 0.5) / grid_size;
  return lv;
}

QuantileGrid from_samples(std::span<const double> samples, int grid_size, Support support) {
  check_support(support);
  if (samples.empty()) throw IngestionError("cannot build a distribution from zero samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  for (double x : sorted) {
    if (!std::isfinite(x) || x < support.lower || x > support.upper)
      throw IngestionError("sample " + std::to_string(x) + " lies outside the support [" +
                           std::to_string(support.lower) + ", " + std::to_string(support.upper) +
                           "]");
  }
  std::sort(sorted.begin(), sorted.end());
  const Vector lv = levels(grid_size);
  const auto n = static_cast<double>(sorted.size());
  Vector q(grid_size);
  for (int k = 0; k < grid_size; ++k) {
    const double h = (n - 1.0) * lv[k];
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    q[k] = sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  }
  return QuantileGrid(project_values(q, support), support);
}

QuantileGrid truncated_normal(double mean, double sd, int grid_size, Support support) {
  check_support(support);
  if (!(sd > 0)) throw UsageError("normal scale must be positive");
  const boost::math::normal_distribution<double> std_normal;
  const double lo = boost::math::cdf(std_normal, (support.lower - mean) / sd);
  const double hi = boost::math::cdf(std_normal, (support.upper - mean) / sd);
  if (!(hi > lo)) throw UsageError("normal law has no mass on the support");
  const Vector lv = levels(grid_size);
  Vector q(grid_size);
  for (int k = 0; k < grid_size; ++k) {
    const double p = std::clamp(lo + lv[k] * (hi - lo), 1e-300, 1.0 - 1e-16);
    q[k] = mean + sd * boost::math::quantile(std_normal, p);
  }
  return QuantileGrid(project_values(q, support), support);
}

QuantileGrid from_histogram(std::span<const double> edges, std::span<const double> masses,
                            int grid_size, Support support) {
  check_support(support);
  if (edges.size() != masses.size() + 1 || masses.empty())
    throw IngestionError("histogram needs one more edge than bins");
  double total = 0.0;
  for (std::size_t b = 0; b < masses.size(); ++b) {
    if (!(masses[b] >= 0) || !std::isfinite(masses[b]))
      throw IngestionError("histogram masses must be finite and non-negative");
    if (!(edges[b + 1] > edges[b])) throw IngestionError("histogram edges must increase");
    total += masses[b];
  }
  if (!(total > 0)) throw IngestionError("histogram has zero total mass");
  if (edges.front() < support.lower || edges.back() > support.upper)
    throw IngestionError("histogram extends beyond the support");

  // Piecewise-linear CDF through (edge, cumulative mass); invert at each level.
  std::vector<double> cdf(edges.size(), 0.0);
  for (std::size_t b = 0; b < masses.size(); ++b) cdf[b + 1] = cdf[b] + masses[b] / total;
  const Vector lv = levels(grid_size);
  Vector q(grid_size);
  std::size_t b = 0;
  for (int k = 0; k < grid_size; ++k) {
    while (b + 1 < masses.size() && cdf[b + 1] < lv[k]) ++b;
    const double mass = cdf[b + 1] - cdf[b];
    const double frac = mass > 0 ? std::clamp((lv[k] - cdf[b]) / mass, 0.0, 1.0) : 0.0;
    q[k] = edges[b] + frac * (edges[b + 1] - edges[b]);
  }
  return QuantileGrid(project_values(q, support), support);
}

double distance(const QuantileGrid& a, const QuantileGrid& b) {
  if (a.size() != b.size()) throw DispatchError("quantile grids have different sizes");
  return std::sqrt((a.values() - b.values()).squaredNorm() / a.size());
}

MonotoneMap transport_map(const QuantileGrid& a, const QuantileGrid& b) {
  if (a.size() != b.size()) throw DispatchError("quantile grids have different sizes");
  return map_between(a.values(), b.values(), a.support());
}

QuantileGrid apply_pushforward(const MonotoneMap& map, const QuantileGrid& c) {
  return QuantileGrid(project_values(map.evaluate_sorted(c.values()), c.support()), c.support());
}

QuantileGrid mccann(const QuantileGrid& a, const QuantileGrid& b, double t) {
  if (a.size() != b.size()) throw DispatchError("quantile grids have different sizes");
  if (t == 0.0) return a;
  if (t == 1.0) return b;
  return QuantileGrid((1.0 - t) * a.values() + t * b.values(), a.support());
}

QuantileGrid ubiquity(const QuantileGrid& w1, const QuantileGrid& w2, const QuantileGrid& w3) {
  if (w1.size() != w2.size() || w1.size() != w3.size())
    throw DispatchError("quantile grids have different sizes");
  if (w1.values() == w2.values()) return w3;
  return apply_pushforward(transport_map(w1, w2), w3);
}

QuantileGrid frechet_mean(std::span<const QuantileGrid> points, std::span<const double> weights) {
  if (points.empty() || points.size() != weights.size())
    throw UsageError("Fréchet mean needs a non-empty sample with one weight per point");
  Vector sum = Vector::Zero(points.front().size());
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != sum.size()) throw DispatchError("quantile grids have different sizes");
    sum += weights[i] * points[i].values();
    total += weights[i];
  }
  if (!(total > 0)) throw UsageError("Fréchet mean weights must have positive sum");
  return QuantileGrid(sum / total, points.front().support());
}

QuantileGrid project(const Vector& values, Support support) {
  return QuantileGrid(project_values(values, support), support);
}

double quantile_at(const Vector& values, Support support, double level) {
  const Vector ext = extended_knots(values, support);
  const Vector lv = extended_levels(values.size());
  level = std::clamp(level, 0.0, 1.0);
  const double* begin = lv.data();
  const Eigen::Index j = std::lower_bound(begin, begin + lv.size(), level) - begin;
  if (j == 0) return ext[0];
  const double lam = (level - lv[j - 1]) / (lv[j] - lv[j - 1]);
  return ext[j - 1] + lam * (ext[j] - ext[j - 1]);
}

}  // namespace wasserstein

WassersteinSpace::WassersteinSpace(SpaceDescriptor descriptor) : Space(std::move(descriptor)) {
  if (kind() != SpaceKind::wasserstein)
    throw UsageError("WassersteinSpace needs a wasserstein descriptor");
}

void WassersteinSpace::check_member_impl(const Vector& payload) const {
  const double tol = tolerance();
  const Support s = support();
  for (Eigen::Index k = 0; k < payload.size(); ++k) {
    if (payload[k] < s.lower - tol || payload[k] > s.upper + tol)
      throw GeometryError("quantile value outside the support");
    if (k > 0 && payload[k] < payload[k - 1] - tol)
      throw GeometryError("quantile values must be non-decreasing");
  }
}

double WassersteinSpace::distance(const Vector& a, const Vector& b) const {
  return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

Vector WassersteinSpace::geodesic(const Vector& a, const Vector& b, double t) const {
  if (t == 0.0) return a;
  if (t == 1.0) return b;
  return (1.0 - t) * a + t * b;
}

Vector WassersteinSpace::ubiquity(const Vector& a, const Vector& b, const Vector& c) const {
  if (a == b) return c;
  return project_values(map_between(a, b, support()).evaluate_sorted(c), support());
}

Vector WassersteinSpace::frechet_mean(std::span<const Vector* const> points,
                                      std::span<const double> weights) const {
  Vector sum = Vector::Zero(payload_size());
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    sum += weights[i] * *points[i];
    total += weights[i];
  }
  return sum / total;
}

Vector WassersteinSpace::project(const Vector& w) const { return project_values(w, support()); }

}  // namespace got
