#pragma once

#include "got/space.hpp"

namespace got {

// R^d with the Euclidean norm. Reference geometry: every transport is a shift.
class EuclideanSpace final : public Space {
 public:
  explicit EuclideanSpace(SpaceDescriptor descriptor);

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
