#pragma once

// Bounding boxes, median splits, and the (balanced) median split tree.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hdgknn/core.hpp"

namespace hdgknn {

using NodeId = std::uint32_t;

struct Box {
  std::vector<std::pair<double, double>> intervals;

  std::size_t longest_dim() const;  // ties -> smallest index
  bool contains(Coords p) const;
};

/// Tight axis-parallel bounding box. Throws on an empty id set.
Box mbb(const Dataset& data, std::span<const PointId> ids);

struct MedianSplit {
  std::vector<PointId> lower;  // coordinate <= split_value, size ceil(m/2)
  std::vector<PointId> upper;  // coordinate >  split_value, size floor(m/2)
  std::size_t split_dim = 0;
  double split_value = 0.0;
};

/// Splits along the longest bounding-box side at the ceil(m/2)-th smallest
/// coordinate. Requires at least two points with distinct coordinates on
/// the split dimension.
MedianSplit median_split(const Dataset& data, std::span<const PointId> ids);

struct TreeNode {
  NodeId id = 0;
  std::vector<PointId> point_ids;
  std::optional<std::uint32_t> split_dim;
  std::optional<double> split_value;
  std::vector<NodeId> children;
  std::uint32_t depth = 0;

  bool is_leaf() const noexcept { return children.empty(); }
};

/// Node 0 is the root. In MST form every interior node has exactly two
/// children; in BMST form nodes are numbered depth-major and nodes on the
/// flattening layer parent their subtree's singletons directly.
struct SplitTree {
  std::vector<TreeNode> nodes;

  std::uint32_t height() const;  // max depth
  std::vector<std::vector<NodeId>> layers() const;
};

/// Recursive median splits down to singleton leaves.
SplitTree build_mst(const Dataset& data);

/// Smallest i with floor(n / 2^i) <= 3.
std::uint32_t flattening_layer(std::size_t n);

/// Attaches each flattening-layer node's singleton leaves directly beneath
/// it and drops the interior nodes in between, so all leaves share depth
/// flattening_layer(n) + 1 (or 0 when n == 1). Output is numbered in
/// depth-major, left-to-right order.
SplitTree balance_to_bmst(const SplitTree& mst);

}  // namespace hdgknn
