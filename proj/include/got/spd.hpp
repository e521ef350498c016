#pragma once

#include <Eigen/Core>

#include "got/space.hpp"

namespace got {

// Cholesky factors are stored packed: the lower triangle of L, row-major,
// diagonal included, so entry (i, j) with j <= i sits at i(i+1)/2 + j.

inline Eigen::Index packed_index(Eigen::Index i, Eigen::Index j) { return i * (i + 1) / 2 + j; }

Vector pack_lower(const Eigen::MatrixXd& lower);
Eigen::MatrixXd unpack_lower(const Vector& packed, int matrix_size);

/// Cholesky factor of a symmetric positive-definite matrix, packed. Throws
/// IngestionError for asymmetric (beyond 1e-12 relative) or non-PD input.
Vector cholesky_factor(const Eigen::MatrixXd& spd);
/// L L^T from a packed factor.
Eigen::MatrixXd to_spd(const Vector& packed, int matrix_size);

/// Log-Cholesky chart: strictly-lower entries unchanged, diagonal -> log.
Vector to_chart(const Vector& packed, int matrix_size);
Vector from_chart(const Vector& chart, int matrix_size);

/// SPD matrices through their Cholesky factors with the log-Cholesky metric.
/// The chart is a global isometry onto R^{m(m+1)/2}, so every operation is
/// Euclidean arithmetic in chart coordinates.
class SpdSpace final : public Space {
 public:
  explicit SpdSpace(SpaceDescriptor descriptor);

  int matrix_size() const { return descriptor().dimension; }
  Vector chart(const Vector& packed) const { return to_chart(packed, matrix_size()); }
  Vector unchart(const Vector& chart) const { return from_chart(chart, matrix_size()); }

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
