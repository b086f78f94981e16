#include "hdgknn/split_tree.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <stdexcept>

namespace hdgknn {

std::size_t Box::longest_dim() const {
  std::size_t best = 0;
  double best_len = -1.0;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const double len = intervals[i].second - intervals[i].first;
    if (len > best_len) {
      best_len = len;
      best = i;
    }
  }
  return best;
}

bool Box::contains(Coords p) const {
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    if (p[i] < intervals[i].first || p[i] > intervals[i].second) return false;
  }
  return true;
}

Box mbb(const Dataset& data, std::span<const PointId> ids) {
  if (ids.empty()) throw std::invalid_argument("mbb: empty point set");
  Box box;
  const std::size_t d = data.dim();
  box.intervals.assign(d, {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
  for (PointId id : ids) {
    const Coords p = data.point(id);
    for (std::size_t i = 0; i < d; ++i) {
      box.intervals[i].first = std::min(box.intervals[i].first, p[i]);
      box.intervals[i].second = std::max(box.intervals[i].second, p[i]);
    }
  }
  return box;
}

MedianSplit median_split(const Dataset& data, std::span<const PointId> ids) {
  if (ids.size() < 2) throw std::invalid_argument("median_split: need at least two points");
  MedianSplit out;
  out.split_dim = mbb(data, ids).longest_dim();
  const std::size_t dim = out.split_dim;

  std::vector<PointId> work(ids.begin(), ids.end());
  const std::size_t lower_size = (work.size() + 1) / 2;
  auto by_coord = [&](PointId a, PointId b) {
    const double ca = data.point(a)[dim], cb = data.point(b)[dim];
    return ca < cb || (ca == cb && a < b);
  };
  auto nth = work.begin() + static_cast<std::ptrdiff_t>(lower_size - 1);
  std::nth_element(work.begin(), nth, work.end(), by_coord);
  out.split_value = data.point(*nth)[dim];

  for (PointId id : ids) {
    if (data.point(id)[dim] <= out.split_value)
      out.lower.push_back(id);
    else
      out.upper.push_back(id);
  }
  if (out.lower.size() != lower_size)
    throw std::invalid_argument("median_split: duplicate coordinates on the split dimension");
  return out;
}

std::uint32_t SplitTree::height() const {
  std::uint32_t h = 0;
  for (const auto& n : nodes) h = std::max(h, n.depth);
  return h;
}

std::vector<std::vector<NodeId>> SplitTree::layers() const {
  std::vector<std::vector<NodeId>> out(nodes.empty() ? 0 : height() + 1);
  for (const auto& n : nodes) out[n.depth].push_back(n.id);
  return out;
}

SplitTree build_mst(const Dataset& data) {
  if (data.empty()) throw std::invalid_argument("build_mst: empty dataset");
  SplitTree tree;
  TreeNode root;
  root.point_ids.resize(data.size());
  for (PointId i = 0; i < data.size(); ++i) root.point_ids[i] = i;
  tree.nodes.push_back(std::move(root));

  // Explicit stack; each split is independent of its siblings.
  std::vector<NodeId> pending{0};
  while (!pending.empty()) {
    const NodeId cur = pending.back();
    pending.pop_back();
    if (tree.nodes[cur].point_ids.size() < 2) continue;
    MedianSplit split = median_split(data, tree.nodes[cur].point_ids);
    const std::uint32_t child_depth = tree.nodes[cur].depth + 1;
    tree.nodes[cur].split_dim = static_cast<std::uint32_t>(split.split_dim);
    tree.nodes[cur].split_value = split.split_value;
    for (auto* part : {&split.lower, &split.upper}) {
      TreeNode child;
      child.id = static_cast<NodeId>(tree.nodes.size());
      child.point_ids = std::move(*part);
      child.depth = child_depth;
      tree.nodes[cur].children.push_back(child.id);
      tree.nodes.push_back(std::move(child));
    }
    pending.push_back(tree.nodes[cur].children[1]);
    pending.push_back(tree.nodes[cur].children[0]);
  }
  return tree;
}

std::uint32_t flattening_layer(std::size_t n) {
  std::uint32_t i = 0;
  while ((n >> i) > 3) ++i;
  return i;
}

SplitTree balance_to_bmst(const SplitTree& mst) {
  if (mst.nodes.empty()) throw std::invalid_argument("balance_to_bmst: empty tree");
  const std::uint32_t flat = flattening_layer(mst.nodes[0].point_ids.size());

  // Singleton leaves under `id`, left to right.
  auto collect_leaves = [&mst](NodeId id) {
    std::vector<NodeId> leaves, stack{id};
    while (!stack.empty()) {
      const NodeId cur = stack.back();
      stack.pop_back();
      const auto& node = mst.nodes[cur];
      if (node.is_leaf()) {
        leaves.push_back(cur);
      } else {
        for (auto it = node.children.rbegin(); it != node.children.rend(); ++it) stack.push_back(*it);
      }
    }
    return leaves;
  };

  SplitTree out;
  // (source node, parent in output)
  std::deque<std::pair<NodeId, std::optional<NodeId>>> queue{{0, std::nullopt}};
  while (!queue.empty()) {
    auto [src, parent] = queue.front();
    queue.pop_front();
    const TreeNode& from = mst.nodes[src];

    TreeNode node;
    node.id = static_cast<NodeId>(out.nodes.size());
    node.point_ids = from.point_ids;
    node.depth = parent ? out.nodes[*parent].depth + 1 : 0;
    if (parent) out.nodes[*parent].children.push_back(node.id);

    if (node.depth < flat) {
      node.split_dim = from.split_dim;
      node.split_value = from.split_value;
      for (NodeId c : from.children) queue.emplace_back(c, node.id);
    } else if (node.depth == flat && !from.is_leaf()) {
      for (NodeId leaf : collect_leaves(src)) queue.emplace_back(leaf, node.id);
    }
    out.nodes.push_back(std::move(node));
  }
  return out;
}

}  // namespace hdgknn
