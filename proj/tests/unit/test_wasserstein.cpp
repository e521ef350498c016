#include <doctest.h>

#include <vector>

#include "got/isotonic.hpp"
#include "got/transport.hpp"
#include "support.hpp"

using namespace got;
using testing::max_abs_diff;
using testing::vec;

namespace {

// Uniform[lo, hi] at the midpoint levels.
QuantileGrid uniform_law(double lo, double hi, int m, Support s) {
  return QuantileGrid(lo + (hi - lo) * wasserstein::levels(m).array(), s);
}

// Near-standard normals on a wide support: transports of these never reach the support ends.
SpacePoint interior_law(const SpacePtr& space, std::mt19937_64& rng) {
  const auto& d = space->descriptor();
  return SpacePoint(space, wasserstein::truncated_normal(testing::uniform(rng, -1, 1), testing::uniform(rng, 0.8, 1.25),
                                                         d.dimension, {d.lower, d.upper})
                               .values());
}

}  // namespace

TEST_CASE("levels are cell midpoints") {
  const Vector u = wasserstein::levels(4);
  CHECK(max_abs_diff(u, vec({0.125, 0.375, 0.625, 0.875})) < 1e-15);
}

TEST_CASE("from_samples") {
  const Support s{0, 10};
  const std::vector<double> atom{5, 5, 5};
  CHECK(wasserstein::from_samples(atom, 50, s).values().isConstant(5.0));
  const std::vector<double> one{2};
  CHECK(wasserstein::from_samples(one, 7, s).values().isConstant(2.0));

  const int n = 1001;
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) grid[i] = static_cast<double>(i) / (n - 1);
  const auto q = wasserstein::from_samples(grid, 500, {0, 1});
  CHECK(max_abs_diff(q.values(), wasserstein::levels(500)) <= 1.0 / n);

  const std::vector<double> outside{1, 11};
  CHECK_THROWS_AS(wasserstein::from_samples(outside, 10, s), IngestionError);
  CHECK_THROWS_AS(wasserstein::from_samples(std::vector<double>{}, 10, s), IngestionError);
}

TEST_CASE("wasserstein distance closed forms") {
  const Support s{0, 2};
  const int m = 400;
  const auto u01 = uniform_law(0, 1, m, s);
  CHECK(wasserstein::distance(u01, u01) == 0.0);
  CHECK(wasserstein::distance(u01, uniform_law(0.5, 1.5, m, s)) == doctest::Approx(0.5).epsilon(1e-12));
  // midpoint rule on u^2 is exact up to 1/(12 m^2)
  CHECK(wasserstein::distance(u01, uniform_law(0, 2, m, s)) == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-5));
}

TEST_CASE("transport maps between uniforms") {
  const Support s{0, 2};
  const int m = 200;
  const auto u01 = uniform_law(0, 1, m, s), u02 = uniform_law(0, 2, m, s);
  const MonotoneMap same = wasserstein::transport_map(u01, u01);
  const MonotoneMap dbl = wasserstein::transport_map(u01, u02);
  const MonotoneMap half = wasserstein::transport_map(u02, u01);
  for (double x : {0.0, 0.01, 0.3, 0.77, 1.0}) {
    CHECK(std::abs(same(x) - x) < 1e-8);
    CHECK(std::abs(dbl(x) - 2 * x) < 1e-8);
    CHECK(std::abs(half(2 * x) - x) < 1e-8);
  }
  const Vector sampled = dbl.sample(5);
  CHECK(max_abs_diff(sampled, vec({0, 1, 2, 2, 2})) < 1e-8);
}

TEST_CASE("flat regions of the CDF resolve to the left endpoint") {
  const MonotoneMap map(vec({0, 1, 1, 2}), vec({0, 1, 3, 4}), {0, 5});
  CHECK(map(1.0) == 1.0);
  CHECK(map(0.5) == doctest::Approx(0.5));
  CHECK(map(1.5) == doctest::Approx(3.5));
}

TEST_CASE("pushforward") {
  const Support s{0, 10};
  const int m = 100;
  const auto c = uniform_law(0, 1, m, s);
  CHECK(max_abs_diff(wasserstein::apply_pushforward(MonotoneMap::identity(s), c).values(), c.values()) < 1e-14);
  const MonotoneMap dbl(vec({0, 5}), vec({0, 10}), s);
  CHECK(max_abs_diff(wasserstein::apply_pushforward(dbl, c).values(), uniform_law(0, 2, m, s).values()) < 1e-12);
  const QuantileGrid atom3(Vector::Constant(m, 3.0), s);
  CHECK(wasserstein::apply_pushforward(dbl, atom3).values().isConstant(6.0));
  const QuantileGrid atom6(Vector::Constant(m, 6.0), s);
  CHECK(wasserstein::apply_pushforward(dbl, atom6).values().isConstant(10.0));
}

TEST_CASE("mccann interpolant") {
  const Support s{0, 2};
  const int m = 200;
  const auto a = uniform_law(0, 1, m, s), b = uniform_law(0, 2, m, s);
  CHECK(wasserstein::mccann(a, b, 0).values() == a.values());
  CHECK(wasserstein::mccann(a, b, 1).values() == b.values());
  CHECK(max_abs_diff(wasserstein::mccann(a, b, 0.5).values(), uniform_law(0, 1.5, m, s).values()) < 1e-12);
  const double d = wasserstein::distance(a, b);
  for (double t : {0.1, 0.5, 0.9})
    CHECK(std::abs(wasserstein::distance(a, wasserstein::mccann(a, b, t)) - t * d) < 1e-10);
  for (auto [t1, t2] : {std::pair{0.2, 0.7}, std::pair{0.9, 0.4}})
    CHECK(std::abs(wasserstein::distance(wasserstein::mccann(a, b, t1), wasserstein::mccann(a, b, t2)) -
                   std::abs(t1 - t2) * d) < 1e-10);
}

TEST_CASE("wasserstein ubiquity") {
  const Support s{0, 2};
  const int m = 200;
  const auto u01 = uniform_law(0, 1, m, s), u02 = uniform_law(0, 2, m, s);
  CHECK(max_abs_diff(wasserstein::ubiquity(u01, u02, u01).values(), u02.values()) < 1e-12);
  CHECK(wasserstein::ubiquity(u02, u02, u01).values() == u01.values());

  const auto space = make_space(wasserstein_descriptor(300, -10, 10));
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto w1 = testing::random_wasserstein(space, rng), w2 = testing::random_wasserstein(space, rng);
    CHECK(max_abs_diff(ubiquity(w1, w2, w1).payload(), w2.payload()) < 1e-8);
  }
}

TEST_CASE("wasserstein frechet mean") {
  const Support s{0, 3};
  const int m = 100;
  const std::vector<QuantileGrid> pts{uniform_law(0, 1, m, s), uniform_law(0, 3, m, s)};
  const std::vector<double> unit{1, 1}, first{1, 0};
  CHECK(max_abs_diff(wasserstein::frechet_mean(pts, unit).values(), uniform_law(0, 2, m, s).values()) < 1e-12);
  CHECK(wasserstein::frechet_mean(pts, first).values() == pts[0].values());
  const std::vector<QuantileGrid> single{pts[1]};
  const std::vector<double> one{1};
  CHECK(wasserstein::frechet_mean(single, one).values() == pts[1].values());
}

TEST_CASE("pool adjacent violators") {
  CHECK(enforce_monotone(vec({1, 2, 3})) == vec({1, 2, 3}));
  CHECK(max_abs_diff(enforce_monotone(vec({2, 1})), vec({1.5, 1.5})) < 1e-15);
  CHECK(max_abs_diff(enforce_monotone(vec({1, 3, 2})), vec({1, 2.5, 2.5})) < 1e-15);
  // L2 oracle: the pooled block (3, 1, 2) averages to 2
  CHECK(max_abs_diff(enforce_monotone(vec({0, 3, 1, 2, 5})), vec({0, 2, 2, 2, 5})) < 1e-15);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector once = enforce_monotone(testing::normal_vector(rng, 40));
    CHECK(is_non_decreasing(once));
    CHECK(enforce_monotone(once) == once);
  }
}

TEST_CASE("projection repairs and clamps") {
  const auto q = wasserstein::project(vec({-1, 0.5, 0.3, 3}), {0, 2});
  CHECK(max_abs_diff(q.values(), vec({0, 0.4, 0.4, 2})) < 1e-15);
  const auto space = make_space(wasserstein_descriptor(3, 0, 1));
  CHECK(space->project(vec({0.1, 0.2, 1.5}))[2] == 1.0);
}

TEST_CASE("gaussian closed form") {
  const auto space = make_space(wasserstein_descriptor(1000, -10, 10));
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const double m1 = testing::uniform(rng, -2, 2), m2 = testing::uniform(rng, -2, 2);
    const double s1 = testing::uniform(rng, 0.5, 2), s2 = testing::uniform(rng, 0.5, 2);
    const auto a = wasserstein::truncated_normal(m1, s1, 1000, {-10, 10});
    const auto b = wasserstein::truncated_normal(m2, s2, 1000, {-10, 10});
    const double exact = (m1 - m2) * (m1 - m2) + (s1 - s2) * (s1 - s2);
    const double d = wasserstein::distance(a, b);
    CHECK(std::abs(d * d - exact) <= 0.01 * exact);
  }
}

TEST_CASE("transport round trip away from the boundary") {
  const auto space = make_space(wasserstein_descriptor(400, -20, 20));
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = interior_law(space, rng), b = interior_law(space, rng), c = interior_law(space, rng);
    const auto there = ubiquity(a, b, c);
    const auto back = ubiquity(b, a, there);
    CHECK(distance(back, c) < 1e-3);
  }
}

TEST_CASE("histogram quantiles") {
  const std::vector<double> edges{0, 1, 3}, masses{1, 1};
  const auto q = wasserstein::from_histogram(edges, masses, 4, {0, 3});
  // F(x) = x/2 on [0,1], 1/2 + (x-1)/4 on [1,3]
  CHECK(max_abs_diff(q.values(), vec({0.25, 0.75, 1.5, 2.5})) < 1e-12);
  const std::vector<double> zero{0, 0};
  CHECK_THROWS(wasserstein::from_histogram(edges, zero, 4, {0, 3}));
}

TEST_CASE("quantile interpolation") {
  const Support s{0, 1};
  const Vector u = wasserstein::levels(10);
  for (double level : {0.0, 0.2, 0.5, 0.93, 1.0})
    CHECK(wasserstein::quantile_at(u, s, level) == doctest::Approx(level));
}

TEST_CASE("membership") {
  const auto space = make_space(wasserstein_descriptor(3, 0, 1));
  CHECK_THROWS_AS(SpacePoint(space, vec({0.2, 0.1, 0.5})), GeometryError);
  CHECK_THROWS_AS(SpacePoint(space, vec({0.2, 0.3, 1.5})), GeometryError);
  CHECK_NOTHROW(SpacePoint(space, vec({0, 0, 1})));
}

TEST_CASE("scalar consistency along the geodesic") {
  const auto space = make_space(wasserstein_descriptor(500, -20, 20));
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = interior_law(space, rng), b = interior_law(space, rng), w = interior_law(space, rng);
    const GeodesicTransport t(a, b);
    const double full = distance(w, t.apply(w));
    for (double alpha : {0.25, 0.5, 0.8})
      CHECK(std::abs(distance(w, scale_apply(alpha, t, w)) - alpha * full) <= 1e-3 * std::max(full, 1e-12) + 1e-9);
  }
}
