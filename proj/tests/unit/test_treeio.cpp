#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "treeph/cohort.hpp"
#include "treeph/error.hpp"
#include "treeph/metrics.hpp"
#include "treeph/tree.hpp"

using namespace treeph;

namespace {

EmbeddedTree parse(const std::string& text, std::vector<std::string>* warnings = nullptr) {
  std::istringstream in(text);
  return parse_tree(in, warnings);
}

EmbeddedTree straight_segment(double length, int vertices) {
  std::vector<Vertex> vs;
  std::vector<std::pair<std::int64_t, std::int64_t>> es;
  for (int i = 0; i < vertices; ++i) {
    vs.push_back({i, {length * i / (vertices - 1), 0.0, 0.0}, std::nullopt});
    if (i > 0) es.emplace_back(i - 1, i);
  }
  return EmbeddedTree(vs, es);
}

EmbeddedTree random_tree(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::vector<Vertex> vs;
  std::vector<std::pair<std::int64_t, std::int64_t>> es;
  for (int i = 0; i < n; ++i) {
    vs.push_back({i * 3 + 1, {u(rng), u(rng), u(rng)}, std::nullopt});
    if (i > 0) es.emplace_back(vs[std::uniform_int_distribution<int>(0, i - 1)(rng)].id, vs[i].id);
  }
  return EmbeddedTree(vs, es);
}

}  // namespace

TEST_CASE("parse_tree: two vertices and one edge form one branch") {
  auto t = parse("v 0 0 0 0\nv 1 0 0 2\ne 0 1\n");
  CHECK(t.vertices().size() == 2);
  CHECK(t.edges().size() == 1);
  CHECK(t.branches().size() == 1);
  CHECK(total_length(t) == 2.0);
}

TEST_CASE("parse_tree: error contracts") {
  CHECK_THROWS_AS(parse("e 0 1\n"), ReferenceError);
  CHECK_THROWS_AS(parse("v 0 0 0 0\nv 0 1 1 1\n"), DuplicateError);
  try {
    parse("v 0 0 0 0\nv 1 0 0 x\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse("v 0 0 0 0\ne 0 0\n"), ParseError);
  CHECK_THROWS_AS(parse("q 1 2\n"), ParseError);
}

TEST_CASE("parse_tree: comments, radius and blank lines") {
  auto t = parse("# header\n\nv 5 1 2 3 0.25  # trailing\nv 7 1 2 4\ne 5 7\n");
  REQUIRE(t.vertices().size() == 2);
  CHECK(t.vertices()[0].radius == 0.25);
  CHECK_FALSE(t.vertices()[1].radius.has_value());
}

TEST_CASE("Y-shaped tree has three branches covering every edge once") {
  auto t = parse("v 0 0 0 0\nv 1 1 0 0\nv 2 -1 0 0\nv 3 0 1 0\ne 0 1\ne 0 2\ne 0 3\n");
  CHECK(t.branches().size() == 3);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    auto r = random_tree(rng, 40);
    std::vector<int> covered(r.edges().size(), 0);
    std::size_t edge_count = 0;
    for (const auto& b : r.branches()) {
      edge_count += b.size() - 1;
      for (std::size_t i = 1; i < b.size(); ++i) {
        for (std::size_t e = 0; e < r.edges().size(); ++e) {
          const auto& ed = r.edges()[e];
          if ((ed.a == b[i - 1] && ed.b == b[i]) || (ed.a == b[i] && ed.b == b[i - 1])) ++covered[e];
        }
      }
    }
    CHECK(edge_count == r.edges().size());
    for (int c : covered) CHECK(c == 1);
  }
}

TEST_CASE("cycles are a warning, not an error") {
  std::vector<std::string> warnings;
  auto t = parse("v 0 0 0 0\nv 1 1 0 0\nv 2 0 1 0\ne 0 1\ne 1 2\ne 2 0\n", &warnings);
  CHECK(t.has_cycle());
  CHECK(warnings.size() == 1);
  CHECK(t.branches().size() == 1);
}

TEST_CASE("total_length examples and oracle") {
  CHECK(total_length(parse("v 0 0 0 0\nv 1 1 0 0\nv 2 1 1 0\nv 3 1 1 1\ne 0 1\ne 1 2\ne 2 3\n")) == 3.0);
  std::mt19937_64 rng(11);
  auto t = random_tree(rng, 51);
  double reversed = 0.0;
  for (auto it = t.edges().rbegin(); it != t.edges().rend(); ++it) {
    reversed += distance(t.vertices()[it->a].position, t.vertices()[it->b].position);
  }
  CHECK(std::abs(total_length(t) - reversed) <= 1e-12 * reversed);
}

TEST_CASE("total_length is invariant under rigid motion") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    auto t = random_tree(rng, 30);
    const double th = 3.0 * u(rng), ph = 3.0 * u(rng);
    const Vec3 shift{5 * u(rng), 5 * u(rng), 5 * u(rng)};
    std::vector<Vertex> moved = t.vertices();
    for (auto& v : moved) {
      const Vec3 p = v.position;
      const Vec3 r1{std::cos(th) * p.x - std::sin(th) * p.y, std::sin(th) * p.x + std::cos(th) * p.y, p.z};
      const Vec3 r2{r1.x, std::cos(ph) * r1.y - std::sin(ph) * r1.z, std::sin(ph) * r1.y + std::cos(ph) * r1.z};
      v.position = r2 + shift;
    }
    std::vector<std::pair<std::int64_t, std::int64_t>> es;
    for (const auto& e : t.edges()) es.emplace_back(t.vertices()[e.a].id, t.vertices()[e.b].id);
    EmbeddedTree m(moved, es);
    CHECK(std::abs(total_length(m) - total_length(t)) <= 1e-9 * total_length(t));
  }
}

TEST_CASE("parse -> write -> parse round-trips") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto t = random_tree(rng, 25);
    std::ostringstream out;
    write_tree(out, t);
    CHECK(parse(out.str()) == t);
  }
  auto with_radius = parse("v 0 0.1 0.2 0.3 1.5\nv 1 1e-7 2 3\ne 1 0\n");
  std::ostringstream out;
  write_tree(out, with_radius);
  CHECK(parse(out.str()) == with_radius);
}

TEST_CASE("subsample: small trees return every vertex") {
  auto t = straight_segment(9.0, 10);
  auto c = subsample(t, 100, 1);
  REQUIRE(c.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) CHECK(c.points[i] == t.vertices()[i].position);
  CHECK_THROWS_AS(subsample(t, 0, 1), ArgumentError);
}

TEST_CASE("subsample: straight segment gets uniform arc-length spacing") {
  auto t = straight_segment(10.0, 101);
  auto c = subsample(t, 5, 1);
  REQUIRE(c.size() == 5);
  std::vector<double> xs;
  for (const auto& p : c.points) xs.push_back(p.x);
  std::sort(xs.begin(), xs.end());
  for (std::size_t i = 1; i < xs.size(); ++i) CHECK(xs[i] - xs[i - 1] == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("subsample is deterministic and Hausdorff-close to the vertex set") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    auto t = random_tree(rng, 200);
    const std::size_t m = 60;
    auto a = subsample(t, m, 42), b = subsample(t, m, 42);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.points[i] == b.points[i]);

    PointCloud vertices;
    for (const auto& v : t.vertices()) vertices.points.push_back(v.position);
    const auto lengths = branch_lengths(t);
    const auto alloc = allocate_points(t, m, 42);
    double bound = 0.0;
    for (std::size_t i = 0; i < lengths.size(); ++i) bound = std::max(bound, lengths[i] / alloc[i]);
    for (const auto& e : t.edges()) {
      bound = std::max(bound, distance(t.vertices()[e.a].position, t.vertices()[e.b].position) / 2.0);
    }
    CHECK(hausdorff(a, vertices) <= bound + 1e-9);
  }
}

TEST_CASE("allocate_points is proportional with at least one per branch") {
  auto t = parse("v 0 0 0 0\nv 1 30 0 0\nv 2 0 10 0\nv 3 0 0 -1\ne 0 1\ne 0 2\ne 0 3\n");
  auto alloc = allocate_points(t, 41, 0);
  const auto lengths = branch_lengths(t);
  std::size_t total = 0;
  for (std::size_t i = 0; i < alloc.size(); ++i) {
    CHECK(alloc[i] >= 1);
    total += alloc[i];
    if (lengths[i] == 30.0) CHECK(alloc[i] == 30);
    if (lengths[i] == 10.0) CHECK(alloc[i] == 10);
  }
  CHECK(total == 41);
}

TEST_CASE("point cloud text round-trips") {
  PointCloud c{{{0.1, -2.0, 3.5}, {1e-9, 4.0, 0.0}}};
  std::ostringstream out;
  write_point_cloud(out, c);
  std::istringstream in(out.str());
  auto back = read_point_cloud(in);
  REQUIRE(back.size() == 2);
  CHECK(back.points[0] == c.points[0]);
  CHECK(back.points[1] == c.points[1]);
}

TEST_CASE("manifest parsing") {
  std::istringstream ok("subject_id,tree_path,age,sex\nA,a.tree,30,M\nB,b.tree,41.5,F\n");
  auto m = parse_manifest(ok);
  REQUIRE(m.rows.size() == 2);
  CHECK(m.rows[1].age == 41.5);
  CHECK(m.rows[0].sex == Sex::Male);
  CHECK(m.resolve(m.rows[0], "/data") == std::filesystem::path("/data/a.tree"));

  std::istringstream dup("subject_id,tree_path,age,sex\nA,a.tree,30,M\nA,b.tree,41,F\n");
  CHECK_THROWS_AS(parse_manifest(dup), DuplicateError);
  std::istringstream neg("subject_id,tree_path,age,sex\nA,a.tree,0,M\n");
  CHECK_THROWS_AS(parse_manifest(neg), ParseError);
  std::istringstream sex("subject_id,tree_path,age,sex\nA,a.tree,20,X\n");
  CHECK_THROWS_AS(parse_manifest(sex), ParseError);
  std::istringstream header("id,path,age,sex\n");
  CHECK_THROWS_AS(parse_manifest(header), ParseError);

  std::ostringstream out;
  write_manifest(out, m);
  std::istringstream again(out.str());
  auto m2 = parse_manifest(again);
  CHECK(m2.rows[1].subject_id == "B");
  CHECK(m2.rows[1].age == 41.5);
}
