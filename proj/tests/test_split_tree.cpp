#include <algorithm>

#include "doctest.h"
#include "hdgknn/split_tree.hpp"
#include "oracles.hpp"

using namespace hdgknn;

namespace {

std::vector<PointId> all_ids(const Dataset& d) {
  std::vector<PointId> ids(d.size());
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

}  // namespace

TEST_CASE("mbb examples") {
  const Dataset one = Dataset::from_rows({{0, 0}});
  const Box b1 = mbb(one, all_ids(one));
  CHECK(b1.intervals == std::vector<std::pair<double, double>>{{0, 0}, {0, 0}});

  const Dataset two = Dataset::from_rows({{0, 0}, {2, 1}});
  const Box b2 = mbb(two, all_ids(two));
  CHECK(b2.intervals == std::vector<std::pair<double, double>>{{0, 2}, {0, 1}});
  CHECK(b2.longest_dim() == 0);
  CHECK_THROWS(mbb(two, std::vector<PointId>{}));
}

TEST_CASE("mbb endpoints are attained") {
  const Dataset data = oracle::uniform(50, 3, 9);
  const Box box = mbb(data, all_ids(data));
  for (std::size_t j = 0; j < 3; ++j) {
    bool lo = false, hi = false;
    for (PointId i = 0; i < data.size(); ++i) {
      CHECK(box.contains(data.point(i)));
      lo = lo || data.point(i)[j] == box.intervals[j].first;
      hi = hi || data.point(i)[j] == box.intervals[j].second;
    }
    CHECK(lo);
    CHECK(hi);
  }
}

TEST_CASE("median_split examples") {
  const Dataset line = Dataset::from_rows({{0, 0}, {1, 0}, {2, 0}, {3, 0}});
  const MedianSplit s = median_split(line, all_ids(line));
  CHECK(s.split_dim == 0);
  CHECK(s.lower == std::vector<PointId>{0, 1});
  CHECK(s.upper == std::vector<PointId>{2, 3});

  const Dataset tall = Dataset::from_rows({{0, 0}, {0, 10}, {1, 5}});
  const MedianSplit t = median_split(tall, all_ids(tall));
  CHECK(t.split_dim == 1);
  CHECK(t.lower.size() == 2);
  CHECK(t.upper.size() == 1);
}

TEST_CASE("median_split agrees with a sort") {
  const Dataset data = oracle::uniform(101, 2, 4);
  const MedianSplit s = median_split(data, all_ids(data));
  CHECK(s.lower.size() == 51);
  CHECK(s.upper.size() == 50);
  const Box box = mbb(data, all_ids(data));
  CHECK(s.split_dim == box.longest_dim());
  std::vector<double> coords;
  for (PointId i = 0; i < data.size(); ++i) coords.push_back(data.point(i)[s.split_dim]);
  std::sort(coords.begin(), coords.end());
  CHECK(s.split_value == coords[50]);
  double lower_max = -1, upper_min = 2;
  for (PointId id : s.lower) lower_max = std::max(lower_max, data.point(id)[s.split_dim]);
  for (PointId id : s.upper) upper_min = std::min(upper_min, data.point(id)[s.split_dim]);
  CHECK(lower_max < upper_min);
}

TEST_CASE("mst shapes") {
  const SplitTree one = build_mst(Dataset::from_rows({{1, 1}}));
  CHECK(one.nodes.size() == 1);
  CHECK(one.nodes[0].is_leaf());

  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 8; ++i) rows.push_back({static_cast<double>(i), 0.0});
  const SplitTree eight = build_mst(Dataset::from_rows(rows));
  CHECK(eight.height() == 3);
  CHECK(eight.nodes.size() == 15);
  for (const auto& node : eight.nodes)
    if (node.is_leaf()) CHECK(node.depth == 3);
}

TEST_CASE("mst layers partition the points") {
  const Dataset data = oracle::uniform(1000, 2, 12);
  const SplitTree tree = build_mst(data);
  for (const auto& node : tree.nodes) {
    if (node.is_leaf()) CHECK(node.point_ids.size() == 1);
    else CHECK(node.children.size() == 2);
  }
  const auto layers = tree.layers();
  // Every layer above the shallowest leaf covers P exactly once.
  std::uint32_t min_leaf = tree.height();
  for (const auto& node : tree.nodes)
    if (node.is_leaf()) min_leaf = std::min(min_leaf, node.depth);
  for (std::uint32_t l = 0; l <= min_leaf; ++l) {
    std::vector<PointId> all;
    for (NodeId id : layers[l])
      all.insert(all.end(), tree.nodes[id].point_ids.begin(), tree.nodes[id].point_ids.end());
    std::sort(all.begin(), all.end());
    CHECK(all == all_ids(data));
  }
}

TEST_CASE("flattening layer arithmetic") {
  CHECK(flattening_layer(1) == 0);
  CHECK(flattening_layer(2) == 0);
  CHECK(flattening_layer(3) == 0);
  CHECK(flattening_layer(4) == 1);
  CHECK(flattening_layer(8) == 2);
  CHECK(flattening_layer(1000) == 8);
  CHECK(flattening_layer(1024) == 9);
  for (std::size_t n = 1; n < 5000; n += 37) {
    const auto i = flattening_layer(n);
    CHECK((n >> i) <= 3);
    if (i > 0) CHECK((n >> (i - 1)) > 3);
  }
}

TEST_CASE("bmst examples") {
  const SplitTree two = balance_to_bmst(build_mst(Dataset::from_rows({{0, 0}, {1, 1}})));
  CHECK(two.nodes.size() == 3);
  CHECK(two.nodes[0].children.size() == 2);

  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 8; ++i) rows.push_back({static_cast<double>(i), 0.5 * i * i});
  const SplitTree eight = balance_to_bmst(build_mst(Dataset::from_rows(rows)));
  const auto layers = eight.layers();
  REQUIRE(layers.size() == 4);
  CHECK(layers[2].size() == 4);
  for (NodeId id : layers[2]) CHECK(eight.nodes[id].children.size() == 2);
  CHECK(layers[3].size() == 8);

  const SplitTree big = balance_to_bmst(build_mst(oracle::uniform(1000, 2, 3)));
  const auto big_layers = big.layers();
  CHECK(big_layers.size() == 10);
  CHECK(big_layers[9].size() == 1000);
  for (const auto& node : big.nodes) {
    if (node.is_leaf()) CHECK(node.depth == 9);
    if (node.depth < 8) CHECK(node.children.size() == 2);
  }
  for (std::size_t l = 0; l <= 8; ++l) CHECK(big_layers[l].size() == (std::size_t{1} << l));
  // depth-major numbering
  for (NodeId i = 1; i < big.nodes.size(); ++i) CHECK(big.nodes[i - 1].depth <= big.nodes[i].depth);
}
