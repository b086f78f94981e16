#pragma once

// Three-phase query over an Hdg: descend the tree to a node holding at most
// 2k points, walk the layer graph greedily towards q, then ask a (c,r)-kNN
// backend with radii growing by c from (D(q, center) + radius) / n.

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "hdgknn/crknn.hpp"
#include "hdgknn/hdg.hpp"

namespace hdgknn {

struct QueryParams {
  std::size_t k = 1;
  double c = 2.0;
  /// Recall target; only used when results are evaluated.
  double delta = 0.9;
};

/// Which guarantee covers the result: loop index 0 answers carry the recall
/// guarantee, later ones the distance guarantee.
enum class GuaranteePath { Recall, Distance };

std::string_view to_string(GuaranteePath path);

struct QueryStats {
  std::size_t descent_nodes = 0;     // nodes visited on the way down, root included
  std::size_t navigation_nodes = 0;  // nodes visited in the layer walk, start included
  std::size_t backend_calls = 0;
  std::size_t candidates_scanned = 0;
  bool fallback = false;  // the exact backend had to step in
  NodeId stop_node = 0;
  NodeId nav_node = 0;
};

struct QueryOutcome {
  std::vector<PointId> ids;
  std::uint32_t loop_index = 0;
  GuaranteePath path = GuaranteePath::Recall;
  QueryStats stats;
};

/// Descends while the current node holds more than 2k points, choosing the
/// child with the closest center (ties go to the later child).
NodeId descend(const Hdg& index, Coords q, std::size_t k, QueryStats* stats = nullptr);

/// Moves to the closest-centered neighbour while that is strictly closer
/// than the current node (ties between neighbours go to the smaller id).
NodeId navigate(const Hdg& index, NodeId start, Coords q, QueryStats* stats = nullptr);

/// Radius r_i = r_0 c^i with r_0 = (D(q, Cen(node)) + Rad(node)) / n, for
/// i = 0 .. ceil(log_c n); a final call at D(q, Cen(node)) + Rad(node)
/// follows if all of them come back empty. A non-exact backend that still
/// fails is replaced by a linear scan and the outcome flagged.
QueryOutcome answer(const Hdg& index, NodeId node, Coords q, const QueryParams& params,
                    const CrKnnBackend& backend);

QueryOutcome query(const Hdg& index, Coords q, const QueryParams& params, const CrKnnBackend& backend);

/// Convenience overload using the exact backend.
QueryOutcome query(const Hdg& index, Coords q, const QueryParams& params);

/// ceil(log_c n), with n = 1 mapping to 0.
std::uint32_t radius_steps(std::size_t n, double c);

}  // namespace hdgknn
