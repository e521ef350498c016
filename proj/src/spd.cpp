#include "got/spd.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace got {

Vector pack_lower(const Eigen::MatrixXd& lower) {
  const Eigen::Index m = lower.rows();
  Vector packed(m * (m + 1) / 2);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) packed[packed_index(i, j)] = lower(i, j);
  return packed;
}

Eigen::MatrixXd unpack_lower(const Vector& packed, int matrix_size) {
  if (packed.size() != static_cast<Eigen::Index>(matrix_size) * (matrix_size + 1) / 2)
    throw GeometryError("packed factor has the wrong length for its matrix size");
  Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(matrix_size, matrix_size);
  for (Eigen::Index i = 0; i < matrix_size; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) lower(i, j) = packed[packed_index(i, j)];
  return lower;
}

Vector cholesky_factor(const Eigen::MatrixXd& spd) {
  if (spd.rows() != spd.cols() || spd.rows() < 1)
    throw IngestionError("SPD input must be a non-empty square matrix");
  if (!spd.allFinite()) throw IngestionError("SPD input contains non-finite entries");
  const double scale = std::max(1.0, spd.cwiseAbs().maxCoeff());
  if ((spd - spd.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw IngestionError("matrix is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(spd);
  if (llt.info() != Eigen::Success) throw IngestionError("matrix is not positive definite");
  Eigen::MatrixXd lower = llt.matrixL();
  for (Eigen::Index i = 0; i < lower.rows(); ++i)
    if (!(lower(i, i) > 0.0)) throw IngestionError("matrix is not positive definite");
  return pack_lower(lower);
}

Eigen::MatrixXd to_spd(const Vector& packed, int matrix_size) {
  const Eigen::MatrixXd lower = unpack_lower(packed, matrix_size);
  return lower * lower.transpose();
}

Vector to_chart(const Vector& packed, int matrix_size) {
  Vector chart = packed;
  for (Eigen::Index i = 0; i < matrix_size; ++i) {
    const Eigen::Index k = packed_index(i, i);
    chart[k] = std::log(packed[k]);
  }
  return chart;
}

Vector from_chart(const Vector& chart, int matrix_size) {
  Vector packed = chart;
  for (Eigen::Index i = 0; i < matrix_size; ++i) {
    const Eigen::Index k = packed_index(i, i);
    packed[k] = std::exp(chart[k]);
  }
  return packed;
}

SpdSpace::SpdSpace(SpaceDescriptor descriptor) : Space(std::move(descriptor)) {
  if (kind() != SpaceKind::spd) throw UsageError("SpdSpace needs an spd descriptor");
}

void SpdSpace::check_member_impl(const Vector& payload) const {
  for (Eigen::Index i = 0; i < matrix_size(); ++i)
    if (!(payload[packed_index(i, i)] > 0.0))
      throw GeometryError("Cholesky factor needs a strictly positive diagonal");
}

double SpdSpace::distance(const Vector& a, const Vector& b) const {
  return (chart(a) - chart(b)).norm();
}

Vector SpdSpace::geodesic(const Vector& a, const Vector& b, double t) const {
  if (t == 0.0) return a;
  if (t == 1.0) return b;
  const Vector ca = chart(a);
  return unchart(ca + t * (chart(b) - ca));
}

Vector SpdSpace::ubiquity(const Vector& a, const Vector& b, const Vector& c) const {
  if (a == b) return c;
  return unchart(chart(c) + (chart(b) - chart(a)));
}

Vector SpdSpace::frechet_mean(std::span<const Vector* const> points,
                              std::span<const double> weights) const {
  Vector sum = Vector::Zero(payload_size());
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    sum += weights[i] * chart(*points[i]);
    total += weights[i];
  }
  return unchart(sum / total);
}

Vector SpdSpace::project(const Vector& w) const { return w; }

}  // namespace got
