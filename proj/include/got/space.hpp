#pragma once

#include <Eigen/Core>

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "got/errors.hpp"

namespace got {

using Vector = Eigen::VectorXd;

enum class SpaceKind { euclidean, wasserstein, sphere, spd };

std::string_view to_string(SpaceKind kind);
SpaceKind space_kind_from_string(std::string_view name);

/// Static description of a geodesic space. Which fields matter depends on
/// `kind`:
///   euclidean    dimension = ambient dimension; optional clamp box
///   wasserstein  dimension = quantile grid size M; support = [lower, upper]
///   sphere       dimension = number of coefficients; quadrature weights,
///                orthant restriction, optional 2-D density grid layout
///   spd          dimension = matrix size m
struct SpaceDescriptor {
  SpaceKind kind = SpaceKind::euclidean;
  int dimension = 1;
  double lower = 0.0;
  double upper = 1.0;
  bool bounded = false;  // euclidean only: clamp coordinates to [lower, upper]
  bool orthant = false;  // sphere only: admissible set is the nonnegative orthant
  std::vector<double> quadrature_weights;  // sphere only; empty means unit weights
  std::vector<int> grid_shape;             // sphere densities: {nx, ny}
  std::vector<double> grid_bounds;         // sphere densities: {x0, x1, y0, y1}
  double tolerance = 1e-10;

  void validate() const;
  /// Number of reals in a point payload.
  int payload_size() const;
  bool operator==(const SpaceDescriptor&) const = default;
};

SpaceDescriptor euclidean_descriptor(int dimension);
SpaceDescriptor wasserstein_descriptor(int grid_size, double lower, double upper);
SpaceDescriptor sphere_descriptor(int dimension, bool orthant = false,
                                  std::vector<double> weights = {});
SpaceDescriptor spd_descriptor(int matrix_size);

/// Geometry backend shared by all points of one space. Every operation is a
/// pure function of its arguments; payloads are assumed to be members.
class Space {
 public:
  explicit Space(SpaceDescriptor descriptor);
  virtual ~Space() = default;

  const SpaceDescriptor& descriptor() const { return descriptor_; }
  SpaceKind kind() const { return descriptor_.kind; }
  int payload_size() const { return payload_size_; }
  double tolerance() const { return descriptor_.tolerance; }

  /// Throws GeometryError when `payload` is not an element of the space.
  virtual void check_member(const Vector& payload) const;

  virtual double distance(const Vector& a, const Vector& b) const = 0;
  virtual Vector geodesic(const Vector& a, const Vector& b, double t) const = 0;
  /// The ubiquity map: endpoint of the geodesic a->b re-attached at c.
  virtual Vector ubiquity(const Vector& a, const Vector& b, const Vector& c) const = 0;
  /// Ubiquity evaluated along the geodesic, Υ(a, γ_{a,b}(r), c). Defaults to
  /// the literal composition.
  virtual Vector partial_transport(const Vector& a, const Vector& b, const Vector& c,
                                   double r) const;
  virtual Vector frechet_mean(std::span<const Vector* const> points,
                              std::span<const double> weights) const = 0;
  virtual Vector project(const Vector& w) const = 0;

 protected:
  virtual void check_member_impl(const Vector& payload) const = 0;

 private:
  SpaceDescriptor descriptor_;
  int payload_size_;
};

using SpacePtr = std::shared_ptr<const Space>;

SpacePtr make_space(const SpaceDescriptor& descriptor);

/// One element of a geodesic space: the owning space plus its payload.
class SpacePoint {
 public:
  /// Validates membership.
  SpacePoint(SpacePtr space, Vector payload);

  /// Skips the membership check; for results of space operations.
  static SpacePoint trusted(SpacePtr space, Vector payload);

  const Space& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  const Vector& payload() const { return payload_; }
  SpaceKind kind() const { return space_->kind(); }

 private:
  struct TrustedTag {};
  SpacePoint(SpacePtr space, Vector payload, TrustedTag);

  SpacePtr space_;
  Vector payload_;
};

bool same_space(const Space& a, const Space& b);
void require_same_space(const SpacePoint& a, const SpacePoint& b);

double distance(const SpacePoint& a, const SpacePoint& b);
SpacePoint geodesic_point(const SpacePoint& a, const SpacePoint& b, double t);
SpacePoint ubiquity(const SpacePoint& w1, const SpacePoint& w2, const SpacePoint& w3);
SpacePoint partial_transport(const SpacePoint& w1, const SpacePoint& w2, const SpacePoint& w3,
                             double r);
SpacePoint project(const SpacePoint& w);

/// Weighted sample Fréchet mean. Weights must be non-negative with positive sum.
SpacePoint frechet_mean(std::span<const SpacePoint> points, std::span<const double> weights);
/// Unit-weight Fréchet mean.
SpacePoint frechet_mean(std::span<const SpacePoint> points);

}  // namespace got
