#pragma once

#include <span>
#include <vector>

#include "got/space.hpp"

namespace got {

/// Orthonormal pair spanning a rotation plane plus the angle between the
/// two generating points.
struct RotationSpec {
  Vector u1;
  Vector u2;
  double angle = 0.0;
};

/// Unit sphere of a finite-dimensional weighted inner-product space,
/// <x, y> = sum_i w_i x_i y_i. With `orthant` set, the admissible subset is
/// the closed nonnegative orthant (square-root densities, compositions).
class SphereSpace final : public Space {
 public:
  explicit SphereSpace(SpaceDescriptor descriptor);

  const Vector& weights() const { return weights_; }
  bool orthant() const { return descriptor().orthant; }

  double inner(const Vector& x, const Vector& y) const;
  double norm(const Vector& x) const;

  /// Plane and angle carrying g1 to g2. Throws GeometryError for (near-)
  /// antipodal pairs. For g1 == g2 the angle is 0 and u2 is zero.
  RotationSpec rotation_plane(const Vector& g1, const Vector& g2) const;
  /// R(angle) = I + sin(angle) Q + (1 - cos(angle)) Q^2 with Q = u2 u1^T - u1 u2^T,
  /// so that R(angle) turns u1 toward u2.
  Vector rotate(const RotationSpec& spec, double angle, const Vector& x) const;
  Vector rotate(const RotationSpec& spec, const Vector& x) const { return rotate(spec, spec.angle, x); }

  Vector exp_map(const Vector& base, const Vector& tangent) const;
  Vector log_map(const Vector& base, const Vector& target) const;
  /// Removes the component of v along base.
  Vector tangent_projection(const Vector& base, const Vector& v) const;

  /// Clamp negatives to zero and renormalize. Throws GeometryError when no
  /// coefficient is positive.
  Vector project_nonneg(const Vector& g) const;

  double distance(const Vector& a, const Vector& b) const override;
  Vector geodesic(const Vector& a, const Vector& b, double t) const override;
  Vector ubiquity(const Vector& a, const Vector& b, const Vector& c) const override;
  /// Moves c a fraction r of the way along the great circle toward
  /// ubiquity(a, b, c).
  Vector partial_transport(const Vector& a, const Vector& b, const Vector& c,
                           double r) const override;
  Vector frechet_mean(std::span<const Vector* const> points,
                      std::span<const double> weights) const override;
  Vector project(const Vector& w) const override;

  /// Square root of a density after renormalizing it to unit mass under the
  /// quadrature weights.
  Vector embed_density(const Vector& density) const;
  /// Inverse of embed_density: squared coefficients, renormalized.
  Vector density_of(const Vector& g) const;

 protected:
  void check_member_impl(const Vector& payload) const override;

 private:
  Vector weights_;
};

/// Product quadrature weights (cell areas) for an nx-by-ny tensor grid over
/// [x0, x1] x [y0, y1], flattened row-major in x.
std::vector<double> grid_cell_weights(int nx, int ny, std::span<const double> bounds);

/// Histogram density of 2-D samples on the same grid. Samples outside the
/// bounds raise IngestionError.
Vector bin_samples_2d(std::span<const double> xs, std::span<const double> ys, int nx, int ny,
                      std::span<const double> bounds);

}  // namespace got
