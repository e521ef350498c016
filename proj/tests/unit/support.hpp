#pragma once

#include <cmath>
#include <random>

#include "got/space.hpp"
#include "got/spd.hpp"
#include "got/sphere.hpp"
#include "got/wasserstein.hpp"

namespace testing {

using got::SpacePoint;
using got::SpacePtr;
using got::Vector;

inline Vector normal_vector(std::mt19937_64& rng, Eigen::Index n, double sd = 1.0) {
  std::normal_distribution<double> z(0.0, sd);
  Vector v(n);
  for (Eigen::Index k = 0; k < n; ++k) v[k] = z(rng);
  return v;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Truncated normal with |m| <= 2 and s in [0.5, 2] on the space's support.
inline SpacePoint random_wasserstein(const SpacePtr& space, std::mt19937_64& rng) {
  const auto& d = space->descriptor();
  const auto q = got::wasserstein::truncated_normal(uniform(rng, -2, 2), uniform(rng, 0.5, 2.0),
                                                    d.dimension, {d.lower, d.upper});
  return SpacePoint(space, q.values());
}

// Unit vector; strictly positive coordinates in orthant mode.
inline SpacePoint random_sphere(const SpacePtr& space, std::mt19937_64& rng) {
  const auto& sphere = static_cast<const got::SphereSpace&>(*space);
  Vector v = normal_vector(rng, space->payload_size());
  if (sphere.orthant()) v = v.cwiseAbs().array() + 0.05;
  return SpacePoint(space, v / sphere.norm(v));
}

inline SpacePoint random_spd(const SpacePtr& space, std::mt19937_64& rng) {
  const auto& spd = static_cast<const got::SpdSpace&>(*space);
  return SpacePoint(space, spd.unchart(normal_vector(rng, space->payload_size(), 0.5)));
}

inline SpacePoint random_point(const SpacePtr& space, std::mt19937_64& rng) {
  switch (space->kind()) {
    case got::SpaceKind::wasserstein: return random_wasserstein(space, rng);
    case got::SpaceKind::sphere: return random_sphere(space, rng);
    case got::SpaceKind::spd: return random_spd(space, rng);
    case got::SpaceKind::euclidean: break;
  }
  return SpacePoint(space, normal_vector(rng, space->payload_size()));
}

inline double max_abs_diff(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); }

inline Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index k = 0;
  for (double x : values) v[k++] = x;
  return v;
}

}  // namespace testing
