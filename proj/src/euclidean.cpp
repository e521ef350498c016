#include "got/euclidean.hpp"

namespace got {

EuclideanSpace::EuclideanSpace(SpaceDescriptor descriptor) : Space(std::move(descriptor)) {
  if (kind() != SpaceKind::euclidean) throw UsageError("EuclideanSpace needs a euclidean descriptor");
}

void EuclideanSpace::check_member_impl(const Vector& payload) const {
  if (!descriptor().bounded) return;
  const double tol = tolerance();
  if ((payload.array() < descriptor().lower - tol).any() ||
      (payload.array() > descriptor().upper + tol).any())
    throw GeometryError("euclidean point outside the declared bounds");
}

double EuclideanSpace::distance(const Vector& a, const Vector& b) const { return (a - b).norm(); }

Vector EuclideanSpace::geodesic(const Vector& a, const Vector& b, double t) const {
  if (t == 0.0) return a;
  if (t == 1.0) return b;
  return a + t * (b - a);
}

Vector EuclideanSpace::ubiquity(const Vector& a, const Vector& b, const Vector& c) const {
  return project(c + (b - a));
}

Vector EuclideanSpace::frechet_mean(std::span<const Vector* const> points,
                                    std::span<const double> weights) const {
  Vector sum = Vector::Zero(payload_size());
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    sum += weights[i] * *points[i];
    total += weights[i];
  }
  return sum / total;
}

Vector EuclideanSpace::project(const Vector& w) const {
  if (!descriptor().bounded) return w;
  return w.cwiseMax(descriptor().lower).cwiseMin(descriptor().upper);
}

}  // namespace got
