#include "got/sphere.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace got {

namespace {

constexpr double antipodal_margin = 1e-8;
constexpr double hemisphere_margin = 1e-6;
constexpr double karcher_step_tol = 1e-10;
constexpr int karcher_max_iter = 1000;
constexpr double orthant_slack = 1e-12;
constexpr double density_mass_slack = 0.01;

}  // namespace

SphereSpace::SphereSpace(SpaceDescriptor descriptor) : Space(std::move(descriptor)) {
  if (kind() != SpaceKind::sphere) throw UsageError("SphereSpace needs a sphere descriptor");
  const auto& w = this->descriptor().quadrature_weights;
  if (w.empty())
    weights_ = Vector::Ones(payload_size());
  else
    weights_ = Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
}

double SphereSpace::inner(const Vector& x, const Vector& y) const {
  return (weights_.array() * x.array() * y.array()).sum();
}

double SphereSpace::norm(const Vector& x) const { return std::sqrt(inner(x, x)); }

void SphereSpace::check_member_impl(const Vector& payload) const {
  const double n = norm(payload);
  if (std::abs(n - 1.0) > tolerance())
    throw GeometryError("sphere point must have unit weighted norm (got " + std::to_string(n) + ")");
  if (orthant() && (payload.array() < -orthant_slack).any())
    throw GeometryError("sphere point has negative coefficients outside the orthant");
}

double SphereSpace::distance(const Vector& a, const Vector& b) const {
  // Equal to arccos<a,b> on unit vectors, without its cancellation near 1.
  return 2.0 * std::atan2(norm(a - b), norm(a + b));
}

RotationSpec SphereSpace::rotation_plane(const Vector& g1, const Vector& g2) const {
  const double c = inner(g1, g2);
  if (c <= -1.0 + antipodal_margin)
    throw GeometryError("non-unique geodesic: sphere points are (nearly) antipodal");
  RotationSpec spec;
  spec.u1 = g1;
  Vector v = g2 - c * g1;
  const double nv = norm(v);
  if (nv == 0.0 || g1 == g2) {
    spec.u2 = Vector::Zero(g1.size());
    spec.angle = 0.0;
    return spec;
  }
  spec.u2 = v / nv;
  spec.angle = distance(g1, g2);
  return spec;
}

Vector SphereSpace::rotate(const RotationSpec& spec, double angle, const Vector& x) const {
  if (angle == 0.0) return x;
  const double a = inner(spec.u1, x);
  const double b = inner(spec.u2, x);
  const double s = std::sin(angle);
  const double one_minus_c = 1.0 - std::cos(angle);
  return x + s * (a * spec.u2 - b * spec.u1) - one_minus_c * (a * spec.u1 + b * spec.u2);
}

Vector SphereSpace::geodesic(const Vector& a, const Vector& b, double t) const {
  if (t == 0.0) return a;
  if (t == 1.0) return b;
  const RotationSpec spec = rotation_plane(a, b);
  if (spec.angle == 0.0) return a;
  const double phi = t * spec.angle;
  return std::cos(phi) * a + std::sin(phi) * spec.u2;
}

Vector SphereSpace::ubiquity(const Vector& a, const Vector& b, const Vector& c) const {
  if (a == b) return c;
  const RotationSpec spec = rotation_plane(a, b);
  Vector out = rotate(spec, c);
  if (orthant()) return project_nonneg(out);
  return out;
}

Vector SphereSpace::partial_transport(const Vector& a, const Vector& b, const Vector& c,
                                      double r) const {
  if (r == 0.0 || a == b) return c;
  Vector target = ubiquity(a, b, c);
  if (r == 1.0) return target;
  return geodesic(c, target, r);
}

Vector SphereSpace::tangent_projection(const Vector& base, const Vector& v) const {
  return v - inner(base, v) * base;
}

Vector SphereSpace::exp_map(const Vector& base, const Vector& tangent) const {
  const double nv = norm(tangent);
  if (nv == 0.0) return base;
  Vector out = std::cos(nv) * base + (std::sin(nv) / nv) * tangent;
  return out / norm(out);
}

Vector SphereSpace::log_map(const Vector& base, const Vector& target) const {
  const double c = inner(base, target);
  if (c <= -1.0 + antipodal_margin)
    throw GeometryError("log map undefined at the antipode");
  Vector w = target - c * base;
  const double nw = norm(w);
  if (nw == 0.0) return Vector::Zero(base.size());
  return (distance(base, target) / nw) * w;
}

Vector SphereSpace::project_nonneg(const Vector& g) const {
  if (!(g.array() < 0.0).any() && std::abs(norm(g) - 1.0) <= orthant_slack) return g;
  Vector clamped = g.cwiseMax(0.0);
  const double n = norm(clamped);
  if (!(n > 0.0))
    throw GeometryError("orthant projection undefined: vector has no positive coefficient");
  return clamped / n;
}

Vector SphereSpace::project(const Vector& w) const {
  if (orthant()) return project_nonneg(w);
  const double n = norm(w);
  if (!(n > 0.0)) throw GeometryError("cannot project the zero vector onto the sphere");
  if (std::abs(n - 1.0) <= orthant_slack) return w;
  return w / n;
}

Vector SphereSpace::frechet_mean(std::span<const Vector* const> points,
                                 std::span<const double> weights) const {
  std::vector<std::size_t> active;
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (weights[i] > 0.0) {
      active.push_back(i);
      total += weights[i];
    }
  }
  for (std::size_t x = 0; x < active.size(); ++x)
    for (std::size_t y = x + 1; y < active.size(); ++y)
      if (distance(*points[active[x]], *points[active[y]]) >= std::numbers::pi - hemisphere_margin)
        throw GeometryError("Fréchet mean needs points within an open hemisphere");

  Vector mean = Vector::Zero(payload_size());
  for (std::size_t i : active) mean += (weights[i] / total) * *points[i];
  const double n0 = norm(mean);
  if (!(n0 > 1e-12)) throw NumericError("sphere Fréchet mean: extrinsic mean vanishes");
  mean /= n0;

  double step = 0.0;
  for (int iter = 0; iter < karcher_max_iter; ++iter) {
    Vector v = Vector::Zero(payload_size());
    for (std::size_t i : active) v += (weights[i] / total) * log_map(mean, *points[i]);
    step = norm(v);
    mean = exp_map(mean, v);
    if (step < karcher_step_tol) return orthant() ? project_nonneg(mean) : mean;
  }
  std::ostringstream msg;
  msg << "sphere Fréchet mean did not converge in " << karcher_max_iter
      << " iterations (last step " << step << ")";
  throw NumericError(msg.str());
}

Vector SphereSpace::embed_density(const Vector& density) const {
  if (density.size() != payload_size())
    throw IngestionError("density has " + std::to_string(density.size()) + " cells, expected " +
                         std::to_string(payload_size()));
  for (Eigen::Index i = 0; i < density.size(); ++i)
    if (!std::isfinite(density[i]) || density[i] < 0.0)
      throw IngestionError("density values must be finite and non-negative");
  const double mass = weights_.dot(density);
  if (!(mass > 0.0)) throw IngestionError("density is identically zero");
  if (std::abs(mass - 1.0) > density_mass_slack)
    throw IngestionError("density integrates to " + std::to_string(mass) +
                         " under the quadrature weights; expected 1 within 1%");
  return (density / mass).cwiseSqrt();
}

Vector SphereSpace::density_of(const Vector& g) const {
  Vector f = g.cwiseAbs2();
  return f / weights_.dot(f);
}

std::vector<double> grid_cell_weights(int nx, int ny, std::span<const double> bounds) {
  if (nx < 1 || ny < 1 || bounds.size() != 4 || !(bounds[1] > bounds[0]) ||
      !(bounds[3] > bounds[2]))
    throw UsageError("density grid needs nx, ny >= 1 and bounds {x0, x1, y0, y1}");
  const double area = (bounds[1] - bounds[0]) / nx * (bounds[3] - bounds[2]) / ny;
  return std::vector<double>(static_cast<std::size_t>(nx) * ny, area);
}

Vector bin_samples_2d(std::span<const double> xs, std::span<const double> ys, int nx, int ny,
                      std::span<const double> bounds) {
  const auto cell = grid_cell_weights(nx, ny, bounds);
  if (xs.size() != ys.size() || xs.empty())
    throw IngestionError("2-D samples need matching, non-empty coordinate lists");
  Vector counts = Vector::Zero(static_cast<Eigen::Index>(nx) * ny);
  const double dx = (bounds[1] - bounds[0]) / nx;
  const double dy = (bounds[3] - bounds[2]) / ny;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double x = xs[k], y = ys[k];
    if (!(x >= bounds[0] && x <= bounds[1] && y >= bounds[2] && y <= bounds[3]))
      throw IngestionError("2-D sample outside the density grid bounds");
    const int i = std::min(nx - 1, static_cast<int>((x - bounds[0]) / dx));
    const int j = std::min(ny - 1, static_cast<int>((y - bounds[2]) / dy));
    counts[static_cast<Eigen::Index>(i) * ny + j] += 1.0;
  }
  return counts / (static_cast<double>(xs.size()) * cell.front());
}

}  // namespace got
