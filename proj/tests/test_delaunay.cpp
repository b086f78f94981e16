#include "doctest.h"
#include "hdgknn/delaunay.hpp"
#include "oracles.hpp"

using namespace hdgknn;

namespace {

std::set<std::pair<std::uint32_t, std::uint32_t>> edge_set(const DtGraph& g) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> out;
  for (std::uint32_t a = 0; a < g.size(); ++a)
    for (std::uint32_t b : g.adjacency[a])
      if (a < b) out.insert({a, b});
  return out;
}

DtGraph graph_from_triangles(std::size_t n, std::vector<std::vector<std::uint32_t>> tris) {
  DtGraph g;
  g.dim = 2;
  g.adjacency.resize(n);
  for (auto& t : tris) {
    std::sort(t.begin(), t.end());
    for (auto a : t)
      for (auto b : t)
        if (a != b) g.adjacency[a].push_back(b);
  }
  for (auto& adj : g.adjacency) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
  g.simplices = std::move(tris);
  return g;
}

}  // namespace

TEST_CASE("single triangle") {
  const Dataset s = Dataset::from_rows({{0, 0}, {1, 0}, {0.2, 0.9}});
  const DtGraph g = build_delaunay(s);
  CHECK(g.edge_count() == 3);
  CHECK(g.simplices.size() == 1);
  CHECK(max_degree(g) == 2);
  CHECK(verify_empty_sphere(s, g).ok);
}

TEST_CASE("complete graph on d + 1 sites has max degree d") {
  const Dataset s = Dataset::from_rows({{0, 0, 0, 0}, {1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}});
  const DtGraph g = build_delaunay(s);
  CHECK(max_degree(g) == 4);
  CHECK(g.edge_count() == 10);
}

TEST_CASE("unit square corners give four sides and one diagonal") {
  const Dataset square = Dataset::from_rows({{0, 0}, {1, 0}, {1, 1}, {0, 1}}).jittered(5);
  const DtGraph g = build_delaunay(square, 1);
  CHECK(g.edge_count() == 5);
  for (auto [a, b] : std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 3}, {0, 3}})
    CHECK(std::binary_search(g.adjacency[a].begin(), g.adjacency[a].end(), static_cast<std::uint32_t>(b)));
  const bool d02 = std::binary_search(g.adjacency[0].begin(), g.adjacency[0].end(), 2u);
  const bool d13 = std::binary_search(g.adjacency[1].begin(), g.adjacency[1].end(), 3u);
  CHECK(d02 != d13);
}

TEST_CASE("wrong diagonal is caught") {
  // Not cocircular: corner 2 pulled inward, so 0-2 is the Delaunay diagonal.
  const Dataset s = Dataset::from_rows({{0, 0}, {1, 0}, {0.9, 0.9}, {0, 1}});
  const auto want = oracle::empty_circle_edges(s);
  REQUIRE(want.count({0, 2}) == 1);
  REQUIRE(want.count({1, 3}) == 0);
  CHECK(verify_empty_sphere(s, graph_from_triangles(4, {{0, 1, 2}, {0, 2, 3}})).ok);

  const EmptySphereReport bad = verify_empty_sphere(s, graph_from_triangles(4, {{0, 1, 3}, {1, 2, 3}}));
  CHECK_FALSE(bad.ok);
  REQUIRE(bad.bad_edges.size() == 1);
  CHECK(bad.bad_edges[0] == std::pair<std::uint32_t, std::uint32_t>{1, 3});
}

TEST_CASE("asymmetric and orphan edges are reported") {
  const Dataset s = Dataset::from_rows({{0, 0}, {1, 0}, {0.2, 0.9}});
  DtGraph g = build_delaunay(s);
  g.adjacency[0].erase(std::find(g.adjacency[0].begin(), g.adjacency[0].end(), 1u));
  const auto rep = verify_empty_sphere(s, g);
  CHECK_FALSE(rep.ok);
  bool asym = false;
  for (const auto& v : rep.violations) asym = asym || v.kind == EmptySphereViolation::Kind::AsymmetricEdge;
  CHECK(asym);
}

TEST_CASE("one-dimensional sites form a path") {
  const Dataset s = Dataset::from_rows({{3.0}, {1.0}, {2.0}, {0.5}});
  const DtGraph g = build_delaunay(s);
  CHECK(g.edge_count() == 3);
  CHECK(g.adjacency[3] == std::vector<std::uint32_t>{1});
  CHECK(g.adjacency[1] == std::vector<std::uint32_t>{2, 3});
}

TEST_CASE("dimension above six is rejected") {
  CHECK_THROWS_AS(build_delaunay(oracle::uniform(10, 7, 1)), ConfigError);
}

TEST_CASE("circumsphere of a triangle") {
  const Dataset s = Dataset::from_rows({{0, 0}, {2, 0}, {0, 2}});
  const std::vector<std::uint32_t> t{0, 1, 2};
  const auto c = circumsphere(s, t);
  REQUIRE(c);
  CHECK(c->center[0] == doctest::Approx(1.0));
  CHECK(c->center[1] == doctest::Approx(1.0));
  CHECK(c->radius == doctest::Approx(std::sqrt(2.0)));
  const Dataset flat = Dataset::from_rows({{0, 0}, {1, 1}, {2, 2}});
  CHECK_FALSE(circumsphere(flat, t));
}

TEST_CASE("planar edges match the empty-circumcircle enumeration") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Dataset s = oracle::uniform(4 + seed % 29, 2, seed);
    const DtGraph g = build_delaunay(s, seed);
    CHECK(edge_set(g) == oracle::empty_circle_edges(s));
  }
  const Dataset s64 = oracle::uniform(64, 2, 99);
  const DtGraph g64 = build_delaunay(s64, 3);
  CHECK(edge_set(g64) == oracle::empty_circle_edges(s64));
  CHECK(verify_empty_sphere(s64, g64).ok);
}

TEST_CASE("triangulations up to d = 4 pass the verifier") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const std::size_t d = 2 + seed % 3;
    const Dataset s = oracle::uniform(5 + (seed * 37) % 124, d, seed);
    const DtGraph g = build_delaunay(s, seed);
    CHECK(verify_empty_sphere(s, g).ok);
  }
}

TEST_CASE("cocircular grids are handled") {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) rows.push_back({double(i), double(j)});
  const Dataset grid = Dataset::from_rows(rows).jittered(3);
  const DtGraph g = build_delaunay(grid, 3);
  CHECK(verify_empty_sphere(grid, g).ok);
  CHECK(edge_set(g) == oracle::empty_circle_edges(grid));
}
