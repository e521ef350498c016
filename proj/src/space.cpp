#include "got/space.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "got/euclidean.hpp"
#include "got/sphere.hpp"
#include "got/spd.hpp"
#include "got/wasserstein.hpp"

namespace got {

std::string_view to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::euclidean: return "euclidean";
    case SpaceKind::wasserstein: return "wasserstein";
    case SpaceKind::sphere: return "sphere";
    case SpaceKind::spd: return "spd";
  }
  return "unknown";
}

SpaceKind space_kind_from_string(std::string_view name) {
  if (name == "euclidean") return SpaceKind::euclidean;
  if (name == "wasserstein") return SpaceKind::wasserstein;
  if (name == "sphere") return SpaceKind::sphere;
  if (name == "spd") return SpaceKind::spd;
  throw UsageError("unknown space kind '" + std::string(name) +
                   "' (expected euclidean, wasserstein, sphere or spd)");
}

void SpaceDescriptor::validate() const {
  if (dimension < 1) throw UsageError("space dimension must be >= 1");
  if (!(tolerance > 0)) throw UsageError("space tolerance must be positive");
  if (kind == SpaceKind::wasserstein || (kind == SpaceKind::euclidean && bounded)) {
    if (!(upper > lower) || !std::isfinite(lower) || !std::isfinite(upper))
      throw UsageError("support interval must have strictly positive finite length");
  }
  if (kind == SpaceKind::sphere) {
    if (!quadrature_weights.empty()) {
      if (static_cast<int>(quadrature_weights.size()) != dimension)
        throw UsageError("sphere quadrature weights must have one entry per coefficient");
      for (double w : quadrature_weights)
        if (!(w > 0) || !std::isfinite(w))
          throw UsageError("sphere quadrature weights must be positive");
    }
    if (!grid_shape.empty()) {
      if (grid_shape.size() != 2 || grid_shape[0] < 1 || grid_shape[1] < 1 ||
          grid_shape[0] * grid_shape[1] != dimension)
        throw UsageError("sphere density grid shape must be {nx, ny} with nx*ny = dimension");
      if (grid_bounds.size() != 4 || !(grid_bounds[1] > grid_bounds[0]) ||
          !(grid_bounds[3] > grid_bounds[2]))
        throw UsageError("sphere density grid bounds must be {x0, x1, y0, y1} with x1>x0, y1>y0");
    }
  }
}

int SpaceDescriptor::payload_size() const {
  if (kind == SpaceKind::spd) return dimension * (dimension + 1) / 2;
  return dimension;
}

SpaceDescriptor euclidean_descriptor(int dimension) {
  SpaceDescriptor d;
  d.kind = SpaceKind::euclidean;
  d.dimension = dimension;
  return d;
}

SpaceDescriptor wasserstein_descriptor(int grid_size, double lower, double upper) {
  SpaceDescriptor d;
  d.kind = SpaceKind::wasserstein;
  d.dimension = grid_size;
  d.lower = lower;
  d.upper = upper;
  return d;
}

SpaceDescriptor sphere_descriptor(int dimension, bool orthant, std::vector<double> weights) {
  SpaceDescriptor d;
  d.kind = SpaceKind::sphere;
  d.dimension = dimension;
  d.orthant = orthant;
  d.quadrature_weights = std::move(weights);
  return d;
}

SpaceDescriptor spd_descriptor(int matrix_size) {
  SpaceDescriptor d;
  d.kind = SpaceKind::spd;
  d.dimension = matrix_size;
  return d;
}

Space::Space(SpaceDescriptor descriptor) : descriptor_(std::move(descriptor)) {
  descriptor_.validate();
  payload_size_ = descriptor_.payload_size();
}

void Space::check_member(const Vector& payload) const {
  if (payload.size() != payload_size_) {
    std::ostringstream msg;
    msg << to_string(kind()) << " point must have " << payload_size_ << " entries, got "
        << payload.size();
    throw GeometryError(msg.str());
  }
  for (Eigen::Index i = 0; i < payload.size(); ++i)
    if (!std::isfinite(payload[i])) throw GeometryError("point payload contains non-finite values");
  check_member_impl(payload);
}

Vector Space::partial_transport(const Vector& a, const Vector& b, const Vector& c,
                                double r) const {
  return ubiquity(a, geodesic(a, b, r), c);
}

SpacePtr make_space(const SpaceDescriptor& descriptor) {
  switch (descriptor.kind) {
    case SpaceKind::euclidean: return std::make_shared<EuclideanSpace>(descriptor);
    case SpaceKind::wasserstein: return std::make_shared<WassersteinSpace>(descriptor);
    case SpaceKind::sphere: return std::make_shared<SphereSpace>(descriptor);
    case SpaceKind::spd: return std::make_shared<SpdSpace>(descriptor);
  }
  throw UsageError("unknown space kind");
}

SpacePoint::SpacePoint(SpacePtr space, Vector payload)
    : space_(std::move(space)), payload_(std::move(payload)) {
  if (!space_) throw UsageError("space point requires a space");
  space_->check_member(payload_);
}

SpacePoint::SpacePoint(SpacePtr space, Vector payload, TrustedTag)
    : space_(std::move(space)), payload_(std::move(payload)) {}

SpacePoint SpacePoint::trusted(SpacePtr space, Vector payload) {
  return SpacePoint(std::move(space), std::move(payload), TrustedTag{});
}

bool same_space(const Space& a, const Space& b) {
  return &a == &b || a.descriptor() == b.descriptor();
}

void require_same_space(const SpacePoint& a, const SpacePoint& b) {
  if (!same_space(a.space(), b.space())) {
    std::ostringstream msg;
    msg << "space mismatch: " << to_string(a.kind()) << "(" << a.space().descriptor().dimension
        << ") vs " << to_string(b.kind()) << "(" << b.space().descriptor().dimension << ")";
    throw DispatchError(msg.str());
  }
}

double distance(const SpacePoint& a, const SpacePoint& b) {
  require_same_space(a, b);
  return a.space().distance(a.payload(), b.payload());
}

SpacePoint geodesic_point(const SpacePoint& a, const SpacePoint& b, double t) {
  require_same_space(a, b);
  if (!(t >= 0.0 && t <= 1.0)) throw UsageError("geodesic fraction must lie in [0, 1]");
  return SpacePoint::trusted(a.space_ptr(), a.space().geodesic(a.payload(), b.payload(), t));
}

SpacePoint ubiquity(const SpacePoint& w1, const SpacePoint& w2, const SpacePoint& w3) {
  require_same_space(w1, w2);
  require_same_space(w1, w3);
  return SpacePoint::trusted(w3.space_ptr(),
                             w1.space().ubiquity(w1.payload(), w2.payload(), w3.payload()));
}

SpacePoint partial_transport(const SpacePoint& w1, const SpacePoint& w2, const SpacePoint& w3,
                             double r) {
  require_same_space(w1, w2);
  require_same_space(w1, w3);
  if (!(r >= 0.0 && r <= 1.0)) throw UsageError("transport fraction must lie in [0, 1]");
  return SpacePoint::trusted(
      w3.space_ptr(), w1.space().partial_transport(w1.payload(), w2.payload(), w3.payload(), r));
}

SpacePoint project(const SpacePoint& w) {
  return SpacePoint::trusted(w.space_ptr(), w.space().project(w.payload()));
}

SpacePoint frechet_mean(std::span<const SpacePoint> points, std::span<const double> weights) {
  if (points.empty()) throw UsageError("Fréchet mean of an empty sample");
  if (points.size() != weights.size())
    throw UsageError("Fréchet mean requires one weight per point");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw UsageError("Fréchet mean weights must be finite and non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw UsageError("Fréchet mean weights must have positive sum");
  std::vector<const Vector*> payloads;
  payloads.reserve(points.size());
  for (const auto& p : points) {
    require_same_space(points.front(), p);
    payloads.push_back(&p.payload());
  }
  // A sample concentrated on one point has that point as its mean, exactly.
  const SpacePoint* support = nullptr;
  bool single_support = true;
  for (std::size_t i = 0; i < points.size() && single_support; ++i) {
    if (weights[i] == 0.0) continue;
    if (!support)
      support = &points[i];
    else if (points[i].payload() != support->payload())
      single_support = false;
  }
  if (single_support) return *support;
  const auto& space = points.front().space();
  return SpacePoint::trusted(points.front().space_ptr(), space.frechet_mean(payloads, weights));
}

SpacePoint frechet_mean(std::span<const SpacePoint> points) {
  std::vector<double> weights(points.size(), 1.0);
  return frechet_mean(points, weights);
}

}  // namespace got
