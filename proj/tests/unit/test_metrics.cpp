#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "treeph/assignment.hpp"
#include "treeph/error.hpp"
#include "treeph/metrics.hpp"

using namespace treeph;

namespace {

PersistenceDiagram dgm(std::vector<std::pair<double, double>> pts, int dim = 1) {
  PersistenceDiagram d;
  d.dimension = dim;
  for (auto [b, e] : pts) d.dots.push_back({b, e, dim});
  return d;
}

PersistenceDiagram random_diagram(std::mt19937_64& rng, int max_dots) {
  const int n = std::uniform_int_distribution<int>(0, max_dots)(rng);
  std::uniform_real_distribution<double> birth(0.0, 10.0), life(0.01, 5.0);
  PersistenceDiagram d;
  d.dimension = 1;
  for (int i = 0; i < n; ++i) {
    const double b = birth(rng);
    d.dots.push_back({b, b + life(rng), 1});
  }
  return d;
}

}  // namespace

TEST_CASE("wasserstein examples") {
  auto d = dgm({{0, 2}, {1, 5}});
  CHECK(wasserstein(d, d) == 0.0);
  CHECK(wasserstein(dgm({{0, 2}}), dgm({})) == doctest::Approx(1.0));
  CHECK(wasserstein(dgm({{0, 2}}), dgm({{0, 3}})) == doctest::Approx(1.0));
  CHECK(wasserstein(dgm({{0, 2}}), dgm({}), {2.0}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(wasserstein(d, d, {0.5}), ArgumentError);
  CHECK_THROWS_AS(wasserstein(dgm({{0, 1}}, 0), dgm({{0, 1}}, 1)), ArgumentError);
}

TEST_CASE("essential dots are matched by sorted birth") {
  auto a = dgm({{0, kInfinity}, {5, kInfinity}, {1, 2}}, 0);
  auto b = dgm({{4, kInfinity}, {1, kInfinity}}, 0);
  CHECK(wasserstein(a, b) == doctest::Approx(1.0 + 1.0 + 0.5));
  CHECK(bottleneck(a, b) == doctest::Approx(1.0));
  auto c = dgm({{0, kInfinity}}, 0);
  CHECK_THROWS_AS(wasserstein(a, c), InfiniteDistanceError);
  CHECK_THROWS_AS(bottleneck(a, c), InfiniteDistanceError);
}

TEST_CASE("bottleneck examples") {
  CHECK(bottleneck(dgm({{0, 4}}), dgm({{1, 4}})) == doctest::Approx(1.0));
  auto d = dgm({{0, 6}, {2, 9}, {1, 3}});
  CHECK(bottleneck(d, d) == 0.0);
  // Three extra near-diagonal dots go to the diagonal.
  auto extra = d;
  extra.dots.push_back({4.0, 4.3, 1});
  extra.dots.push_back({5.0, 5.1, 1});
  extra.dots.push_back({7.0, 7.25, 1});
  const double b = bottleneck(d, extra);
  CHECK(b <= 0.3 / 2 + 1e-12);
  CHECK(b == doctest::Approx(oracle::bottleneck(d.dots, extra.dots, kInfinity)));
}

TEST_CASE("wasserstein and bottleneck match exhaustive matching enumeration") {
  std::mt19937_64 rng(123);
  const double ps[] = {1.0, 2.0, 3.5};
  const double qs[] = {kInfinity, 1.0, 2.0};
  for (int trial = 0; trial < 200; ++trial) {
    auto a = random_diagram(rng, 5), b = random_diagram(rng, 5);
    const double p = ps[trial % 3], q = qs[(trial / 3) % 3];
    CHECK(std::abs(wasserstein(a, b, {p, q}) - oracle::wasserstein(a.dots, b.dots, p, q)) <= 1e-9);
    CHECK(std::abs(bottleneck(a, b, q) - oracle::bottleneck(a.dots, b.dots, q)) <= 1e-9);
  }
}

TEST_CASE("symmetry, triangle inequality and ordering") {
  std::mt19937_64 rng(321);
  for (int trial = 0; trial < 100; ++trial) {
    auto a = random_diagram(rng, 8), b = random_diagram(rng, 8), c = random_diagram(rng, 8);
    for (double p : {1.0, 2.0}) {
      const double ab = wasserstein(a, b, {p}), ba = wasserstein(b, a, {p});
      CHECK(std::abs(ab - ba) <= 1e-9);
      CHECK(ab <= wasserstein(a, c, {p}) + wasserstein(c, b, {p}) + 1e-9);
      CHECK(bottleneck(a, b) <= ab + 1e-9);
    }
    CHECK(bottleneck(a, b) == bottleneck(b, a));
    CHECK(bottleneck(a, b) <= bottleneck(a, c) + bottleneck(c, b) + 1e-9);
    CHECK(wasserstein(a, b, {kInfinity}) == bottleneck(a, b));
  }
}

TEST_CASE("hausdorff") {
  PointCloud origin{{{0, 0, 0}}};
  PointCloud two{{{0, 0, 0}, {1, 0, 0}}};
  CHECK(hausdorff(two, two) == 0.0);
  CHECK(hausdorff(origin, two) == 1.0);
  CHECK(hausdorff(two, origin) == 1.0);
  CHECK_THROWS_AS(hausdorff(PointCloud{}, two), ArgumentError);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    PointCloud a, b;
    for (int i = 0; i < 30; ++i) {
      a.points.push_back({u(rng), u(rng), u(rng)});
      b.points.push_back({u(rng), u(rng), u(rng)});
    }
    CHECK(hausdorff(a, b) == oracle::hausdorff(a, b));
  }
}

TEST_CASE("assignment solver and perfect-matching test") {
  Eigen::MatrixXd cost(3, 3);
  cost << 4, 1, 3, 2, 0, 5, 3, 2, 2;
  double total = 0;
  auto match = solve_assignment(cost, &total);
  CHECK(total == 5.0);
  CHECK(match == std::vector<std::size_t>{1, 0, 2});

  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> ok(3, 3), bad(3, 3);
  ok << true, false, false, true, true, false, false, true, true;
  bad << true, false, false, true, false, false, false, true, true;
  CHECK(has_perfect_matching(ok));
  CHECK_FALSE(has_perfect_matching(bad));
}
