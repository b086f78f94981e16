#include "doctest.h"
#include "hdgknn/bench.hpp"
#include "hdgknn/query.hpp"
#include "oracles.hpp"

using namespace hdgknn;

namespace {

// Descent re-derived from the tree: strictly closer left child wins,
// otherwise the right child.
NodeId oracle_descend(const Hdg& idx, Coords q, std::size_t k) {
  NodeId cur = 0;
  while (idx.nodes[cur].size() > 2 * k && !idx.nodes[cur].children.empty()) {
    const auto& ch = idx.nodes[cur].children;
    NodeId best = ch[0];
    for (std::size_t i = 1; i < ch.size(); ++i)
      if (oracle::dist(idx.nodes[ch[i]].sphere.center, q) <= oracle::dist(idx.nodes[best].sphere.center, q))
        best = ch[i];
    cur = best;
  }
  return cur;
}

}  // namespace

TEST_CASE("radius steps") {
  CHECK(radius_steps(1, 2.0) == 0);
  CHECK(radius_steps(2, 2.0) == 1);
  CHECK(radius_steps(1024, 2.0) == 10);
  CHECK(radius_steps(1025, 2.0) == 11);
  CHECK(radius_steps(4096, 1.5) == 21);
}

TEST_CASE("descend stops at the root when n <= 2k") {
  const Hdg idx = build_index(oracle::uniform(10, 2, 1));
  QueryStats stats;
  const std::vector<double> q{0.5, 0.5};
  CHECK(descend(idx, q, 5, &stats) == 0);
  CHECK(stats.descent_nodes == 1);
}

TEST_CASE("descend follows closer centers") {
  const Hdg idx = build_index(oracle::uniform(8, 2, 6));
  for (const auto& q : std::vector<std::vector<double>>{{0, 0}, {1, 1}, {0, 1}, {0.5, 0.2}}) {
    const NodeId got = descend(idx, q, 1);
    CHECK(got == oracle_descend(idx, q, 1));
    CHECK(idx.nodes[got].size() <= 2);
  }
}

TEST_CASE("descend stop layer for n = 1024, k = 10") {
  const Hdg idx = build_index(gen_poisson(1024, 2, 1.0, 5));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const std::vector<double> q{u(rng), u(rng)};
    const NodeId stop = descend(idx, q, 10);
    CHECK(stop == oracle_descend(idx, q, 10));
    CHECK(idx.nodes[stop].size() >= 10);
    CHECK(idx.nodes[stop].size() < 20);
    CHECK(idx.nodes[stop].depth == 6);
  }
}

TEST_CASE("navigate on a chain reaches the end") {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 8; ++i) rows.push_back({static_cast<double>(i)});
  const Hdg idx = build_index(Dataset::from_rows(rows));
  REQUIRE(idx.layers[2].size() == 4);
  NodeId left = idx.layers[2][0], right = idx.layers[2][0];
  for (NodeId id : idx.layers[2]) {
    if (idx.nodes[id].sphere.center[0] < idx.nodes[left].sphere.center[0]) left = id;
    if (idx.nodes[id].sphere.center[0] > idx.nodes[right].sphere.center[0]) right = id;
  }
  const std::vector<double> q{100.0};
  QueryStats stats;
  CHECK(navigate(idx, left, q, &stats) == right);
  CHECK(stats.navigation_nodes == 4);
  CHECK(navigate(idx, right, q) == right);
}

TEST_CASE("navigate ends at a local optimum") {
  const Hdg idx = build_index(gen_poisson(1024, 2, 1.0, 7));
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const std::vector<double> q{u(rng), u(rng)};
    QueryStats stats;
    const NodeId start = descend(idx, q, 10, &stats);
    const NodeId end = navigate(idx, start, q, &stats);
    const double de = oracle::dist(idx.nodes[end].sphere.center, q);
    CHECK(de <= oracle::dist(idx.nodes[start].sphere.center, q));
    for (NodeId nb : idx.nodes[end].neighbors) CHECK(oracle::dist(idx.nodes[nb].sphere.center, q) >= de);
    CHECK(idx.nodes[end].depth == idx.nodes[start].depth);
    CHECK(stats.navigation_nodes <= idx.layers[idx.nodes[start].depth].size());
  }
}

TEST_CASE("query at a data point finds it") {
  const Hdg idx = build_index(gen_poisson(256, 2, 1.0, 3));
  for (PointId p : {0u, 17u, 255u}) {
    const std::vector<double> q(idx.data.point(p).begin(), idx.data.point(p).end());
    const QueryOutcome out = query(idx, q, {1, 2.0, 0.9});
    REQUIRE(out.ids.size() == 1);
    CHECK(out.ids[0] == p);
  }
}

TEST_CASE("distance criterion after the first radius") {
  const Hdg idx = build_index(gen_poisson(256, 2, 1.0, 11), {0.1, 4});
  const QueryParams params{5, 1.5, 0.8};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.1, 1.1);
  std::size_t later = 0, first = 0;
  for (int i = 0; i < 400; ++i) {
    const std::vector<double> q{u(rng), u(rng)};
    const QueryOutcome out = query(idx, q, params);
    const auto truth = oracle::full_sort_knn(idx.data, q, 5);
    REQUIRE(out.ids.size() == 5);
    const BenchRecord rec = evaluate(idx, i, q, out, params);
    CHECK(rec.t_k == truth.t_k);
    if (out.loop_index > 0) {
      ++later;
      CHECK(out.path == GuaranteePath::Distance);
      for (PointId id : out.ids) CHECK(distance(q, idx.data.point(id)) <= params.c * truth.t_k);
    } else {
      ++first;
      CHECK(out.path == GuaranteePath::Recall);
      CHECK(rec.recall >= 0.0);
      CHECK(rec.recall <= 1.0);
    }
  }
  MESSAGE("loop index 0: " << first << ", later: " << later);
  CHECK(later > 0);
}

TEST_CASE("query on a single point") {
  const Hdg idx = build_index(Dataset::from_rows({{2.0, 3.0, 4.0}}));
  const std::vector<double> q{0, 0, 0};
  const QueryOutcome out = query(idx, q, {1, 2.0, 0.5});
  CHECK(out.ids == std::vector<PointId>{0});
}

TEST_CASE("query validates its arguments") {
  const Hdg idx = build_index(oracle::uniform(20, 2, 1));
  const std::vector<double> q{0.5, 0.5}, bad{0.5};
  CHECK_THROWS(query(idx, q, {21, 2.0, 0.9}));
  CHECK_THROWS(query(idx, q, {0, 2.0, 0.9}));
  CHECK_THROWS(query(idx, q, {2, 1.0, 0.9}));
  CHECK_THROWS(query(idx, bad, {2, 2.0, 0.9}));
}

TEST_CASE("queries are deterministic and satisfy kANN") {
  const Hdg idx = build_index(gen_poisson(2000, 3, 1.0, 2), {0.1, 3});
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const QueryParams params{10, 2.0, 0.5};
  for (BackendKind kind : {BackendKind::Exact, BackendKind::Lsh}) {
    auto backend = make_backend(idx, kind, params, 7);
    for (int i = 0; i < 100; ++i) {
      const std::vector<double> q{u(rng), u(rng), u(rng)};
      const QueryOutcome a = query(idx, q, params, *backend);
      const QueryOutcome b = query(idx, q, params, *backend);
      CHECK(a.ids == b.ids);
      CHECK(a.loop_index == b.loop_index);
      const BenchRecord rec = evaluate(idx, i, q, a, params);
      if (a.loop_index > 0 && kind == BackendKind::Exact) CHECK(rec.distance_ok);
      // Every returned point lies inside the final ball, LSH included.
      CHECK(a.ids.size() == 10);
    }
  }
}
