#pragma once

#include <span>
#include <vector>

#include "got/space.hpp"

namespace got {

struct Support {
  double lower = 0.0;
  double upper = 1.0;
  double width() const { return upper - lower; }
};

/// A 1-D distribution on a bounded support, stored as its quantile function
/// at the midpoint levels u_k = (2k-1)/(2M), k = 1..M.
class QuantileGrid {
 public:
  QuantileGrid(Vector values, Support support);

  const Vector& values() const { return values_; }
  Support support() const { return support_; }
  int size() const { return static_cast<int>(values_.size()); }

 private:
  Vector values_;
  Support support_;
};

/// Monotone map T = Q_b ∘ F_a. With piecewise-linear quantile functions on a
/// shared level grid, T is the piecewise-linear interpolant through the knots
/// (Q_a(u), Q_b(u)), continued affinely beyond the extreme knots.
class MonotoneMap {
 public:
  MonotoneMap(Vector knots_x, Vector knots_y, Support support);

  static MonotoneMap identity(Support support);

  double operator()(double x) const;
  /// Evaluates at non-decreasing arguments in one sweep.
  Vector evaluate_sorted(const Vector& xs) const;
  /// T sampled at `points` equally spaced abscissae spanning the support.
  Vector sample(int points) const;
  MonotoneMap inverse() const;

  const Vector& knots_x() const { return knots_x_; }
  const Vector& knots_y() const { return knots_y_; }
  Support support() const { return support_; }

 private:
  double below(double x) const;
  double above(double x) const;

  Vector knots_x_;
  Vector knots_y_;
  Support support_;
  double left_slope_ = 0.0;
  double right_slope_ = 0.0;
};

namespace wasserstein {

/// Midpoint probability levels (2k-1)/(2M).
Vector levels(int grid_size);

/// Empirical quantiles (linear interpolation of order statistics) at the
/// midpoint levels. Throws IngestionError for samples outside the support.
QuantileGrid from_samples(std::span<const double> samples, int grid_size, Support support);

/// Quantiles of a normal law truncated to the support.
QuantileGrid truncated_normal(double mean, double sd, int grid_size, Support support);

/// Quantiles of a piecewise-uniform law given by bin edges and bin masses.
QuantileGrid from_histogram(std::span<const double> edges, std::span<const double> masses,
                            int grid_size, Support support);

double distance(const QuantileGrid& a, const QuantileGrid& b);
MonotoneMap transport_map(const QuantileGrid& a, const QuantileGrid& b);
QuantileGrid apply_pushforward(const MonotoneMap& map, const QuantileGrid& c);
QuantileGrid mccann(const QuantileGrid& a, const QuantileGrid& b, double t);
QuantileGrid ubiquity(const QuantileGrid& w1, const QuantileGrid& w2, const QuantileGrid& w3);
QuantileGrid frechet_mean(std::span<const QuantileGrid> points, std::span<const double> weights);
/// Isotonic repair followed by clamping to the support.
QuantileGrid project(const Vector& values, Support support);

/// Knots of the interpolated quantile function on the levels
/// {0, u_1, ..., u_M, 1}; the ends extend the first and last cells by half a
/// cell, clamped to the support.
Vector extended_knots(const Vector& values, Support support);
Vector extended_levels(Eigen::Index grid_size);

/// Quantile function at arbitrary levels in [0,1] (interpolated, with the
/// half-cell end extension used throughout).
double quantile_at(const Vector& values, Support support, double level);

}  // namespace wasserstein

class WassersteinSpace final : public Space {
 public:
  explicit WassersteinSpace(SpaceDescriptor descriptor);

  Support support() const { return {descriptor().lower, descriptor().upper}; }
  int grid_size() const { return payload_size(); }

  double distance(const Vector& a, const Vector& b) const override;
  Vector geodesic(const Vector& a, const Vector& b, double t) const override;
  Vector ubiquity(const Vector& a, const Vector& b, const Vector& c) const override;
  Vector frechet_mean(std::span<const Vector* const> points,
                      std::span<const double> weights) const override;
  Vector project(const Vector& w) const override;

 protected:
  void check_member_impl(const Vector& payload) const override;
};

}  // namespace got
