#include <doctest.h>

#include <vector>

#include "got/transport.hpp"
#include "support.hpp"

using namespace got;
using testing::max_abs_diff;
using testing::vec;

namespace {

Vector diag2(double a, double b) { return vec({a, 0, b}); }  // packed 2x2 factor

}  // namespace

TEST_CASE("packed layout") {
  CHECK(packed_index(0, 0) == 0);
  CHECK(packed_index(1, 0) == 1);
  CHECK(packed_index(2, 1) == 4);
  Eigen::MatrixXd l(3, 3);
  l << 1, 0, 0, 2, 3, 0, 4, 5, 6;
  CHECK(pack_lower(l) == vec({1, 2, 3, 4, 5, 6}));
  CHECK(unpack_lower(vec({1, 2, 3, 4, 5, 6}), 3) == l);
}

TEST_CASE("cholesky factor") {
  CHECK(cholesky_factor(Eigen::MatrixXd::Identity(3, 3)) == vec({1, 0, 1, 0, 0, 1}));
  Eigen::MatrixXd d(2, 2);
  d << 4, 0, 0, 9;
  CHECK(max_abs_diff(cholesky_factor(d), diag2(2, 3)) < 1e-15);
  Eigen::MatrixXd s(2, 2);
  s << 2, 1, 1, 2;
  CHECK(max_abs_diff(cholesky_factor(s), vec({std::sqrt(2.0), 1 / std::sqrt(2.0), std::sqrt(1.5)})) < 1e-15);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd g(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) g(i, j) = testing::normal_vector(rng, 1)[0];
    const Eigen::MatrixXd pd = g * g.transpose() + 4 * Eigen::MatrixXd::Identity(4, 4);
    const Eigen::MatrixXd back = to_spd(cholesky_factor(pd), 4);
    CHECK((back - pd).norm() <= 1e-10 * pd.norm());
    const Vector f = cholesky_factor(pd);
    CHECK(max_abs_diff(cholesky_factor(to_spd(f, 4)), f) <= 1e-10 * f.cwiseAbs().maxCoeff());
  }

  Eigen::MatrixXd bad(2, 2);
  bad << 1, 2, 2, 1;
  CHECK_THROWS_AS(cholesky_factor(bad), IngestionError);
  Eigen::MatrixXd asym(2, 2);
  asym << 2, 1, 0.5, 2;
  CHECK_THROWS_AS(cholesky_factor(asym), IngestionError);
}

TEST_CASE("log-cholesky distance") {
  const auto s = make_space(spd_descriptor(2));
  const SpacePoint i2(s, diag2(1, 1)), e(s, diag2(std::exp(1.0), std::exp(1.0)));
  CHECK(distance(i2, i2) == 0.0);
  CHECK(distance(i2, e) == doctest::Approx(std::sqrt(2.0)));
  const SpacePoint a(s, vec({1.5, 0.2, 0.7})), b(s, vec({1.5, -0.3, 0.7}));
  CHECK(distance(a, b) == doctest::Approx(0.5));
  CHECK_THROWS_AS(SpacePoint(s, vec({1, 0, -1})), GeometryError);
}

TEST_CASE("log-cholesky geodesic") {
  const auto s = make_space(spd_descriptor(2));
  const double e = std::exp(1.0);
  const SpacePoint a(s, diag2(1, 1)), b(s, diag2(e * e, e * e));
  CHECK(geodesic_point(a, b, 0).payload() == a.payload());
  CHECK(geodesic_point(a, b, 1).payload() == b.payload());
  CHECK(max_abs_diff(geodesic_point(a, b, 0.5).payload(), diag2(e, e)) < 1e-14);
  const SpacePoint c(s, vec({1, 0, 1})), d(s, vec({1, 4, 1}));
  CHECK(geodesic_point(c, d, 0.25).payload()[1] == doctest::Approx(1.0));
}

TEST_CASE("log-cholesky ubiquity") {
  const auto s = make_space(spd_descriptor(2));
  const SpacePoint m1(s, diag2(1, 1)), m2(s, diag2(2, 2)), m3(s, diag2(3, 3));
  CHECK(max_abs_diff(ubiquity(m1, m2, m3).payload(), diag2(6, 6)) < 1e-14);
  CHECK(ubiquity(m1, m1, m3).payload() == m3.payload());
  const SpacePoint a(s, vec({1.2, 0.4, 0.9})), b(s, vec({0.8, -0.5, 1.7}));
  CHECK(max_abs_diff(ubiquity(a, b, a).payload(), b.payload()) < 1e-15);
}

TEST_CASE("log-cholesky frechet mean") {
  const auto s = make_space(spd_descriptor(2));
  const double e = std::exp(1.0);
  const std::vector<SpacePoint> pts{SpacePoint(s, diag2(1, 1)), SpacePoint(s, diag2(e * e, e * e))};
  CHECK(max_abs_diff(frechet_mean(pts).payload(), diag2(e, e)) < 1e-14);
  const std::vector<SpacePoint> lower{SpacePoint(s, vec({1, 0, 1})), SpacePoint(s, vec({1, 4, 1}))};
  CHECK(frechet_mean(lower).payload()[1] == doctest::Approx(2.0));
}

TEST_CASE("chart is a flat isometry") {
  const auto s = make_space(spd_descriptor(3));
  const auto& spd = static_cast<const SpdSpace&>(*s);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = testing::random_spd(s, rng), b = testing::random_spd(s, rng), c = testing::random_spd(s, rng);
    const Vector ca = spd.chart(a.payload()), cb = spd.chart(b.payload()), cc = spd.chart(c.payload());
    CHECK(std::abs(distance(a, b) - (ca - cb).norm()) < 1e-12);
    const double t = testing::uniform(rng, 0, 1);
    CHECK(max_abs_diff(spd.chart(geodesic_point(a, b, t).payload()), (1 - t) * ca + t * cb) < 1e-12);
    CHECK(max_abs_diff(spd.chart(ubiquity(a, b, c).payload()), cc + cb - ca) < 1e-12);
    for (double r : {0.25, 0.5, 0.75})
      CHECK(distance(ubiquity(a, geodesic_point(a, b, r), c), geodesic_point(c, ubiquity(a, b, c), r)) < 1e-12);
  }
}
