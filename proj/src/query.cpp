#include "hdgknn/query.hpp"

#include <cmath>
#include <stdexcept>

namespace hdgknn {

std::string_view to_string(GuaranteePath path) {
  return path == GuaranteePath::Recall ? "recall" : "distance";
}

namespace {

void check_query(const Hdg& index, Coords q, const QueryParams& params) {
  if (index.nodes.empty()) throw std::invalid_argument("query: empty index");
  if (q.size() != index.dim()) throw std::invalid_argument("query: dimension mismatch");
  if (params.k == 0 || params.k > index.size()) throw std::invalid_argument("query: k must be in [1, n]");
  if (!(params.c > 1.0)) throw std::invalid_argument("query: c must exceed 1");
}

double center_distance(const Hdg& index, NodeId id, Coords q) {
  return distance(q, index.nodes[id].sphere.center);
}

}  // namespace

std::uint32_t radius_steps(std::size_t n, double c) {
  if (n <= 1) return 0;
  const double raw = std::log(static_cast<double>(n)) / std::log(c);
  return static_cast<std::uint32_t>(std::ceil(raw - 1e-12 * raw));
}

NodeId descend(const Hdg& index, Coords q, std::size_t k, QueryStats* stats) {
  NodeId cur = 0;
  std::size_t visited = 1;
  while (index.nodes[cur].size() > 2 * k && !index.nodes[cur].children.empty()) {
    const auto& children = index.nodes[cur].children;
    NodeId best = children.front();
    double best_d = center_distance(index, best, q);
    for (std::size_t i = 1; i < children.size(); ++i) {
      const double dist = center_distance(index, children[i], q);
      // Binary rule: left only when strictly closer; generalised to "later wins ties".
      if (!(best_d < dist)) {
        best = children[i];
        best_d = dist;
      }
    }
    cur = best;
    ++visited;
  }
  if (stats) {
    stats->descent_nodes = visited;
    stats->stop_node = cur;
  }
  return cur;
}

NodeId navigate(const Hdg& index, NodeId start, Coords q, QueryStats* stats) {
  NodeId cur = start;
  double cur_d = center_distance(index, cur, q);
  std::size_t visited = 1;
  for (;;) {
    NodeId best = cur;
    double best_d = cur_d;
    for (NodeId nb : index.nodes[cur].neighbors) {
      const double dist = center_distance(index, nb, q);
      if (dist < best_d) {  // neighbours are sorted, so ties keep the smaller id
        best = nb;
        best_d = dist;
      }
    }
    if (best == cur) break;
    cur = best;
    cur_d = best_d;
    ++visited;
  }
  if (stats) {
    stats->navigation_nodes = visited;
    stats->nav_node = cur;
  }
  return cur;
}

QueryOutcome answer(const Hdg& index, NodeId node, Coords q, const QueryParams& params,
                    const CrKnnBackend& backend) {
  check_query(index, q, params);
  QueryOutcome out;
  const HdgNode& n = index.nodes.at(node);
  const double reach = center_distance(index, node, q) + n.sphere.radius;
  const std::uint32_t steps = radius_steps(index.size(), params.c);

  auto call = [&](double r) {
    CrKnnReply reply = backend.answer(q, params.k, params.c, r);
    ++out.stats.backend_calls;
    out.stats.candidates_scanned += reply.scanned;
    return reply;
  };

  double r = reach / static_cast<double>(index.size());
  for (std::uint32_t i = 0; i <= steps; ++i) {
    if (i > 0) r *= params.c;
    CrKnnReply reply = call(r);
    if (reply.ids) {
      out.ids = std::move(*reply.ids);
      out.loop_index = i;
      out.path = i == 0 ? GuaranteePath::Recall : GuaranteePath::Distance;
      return out;
    }
  }

  out.loop_index = steps + 1;
  out.path = out.loop_index == 0 ? GuaranteePath::Recall : GuaranteePath::Distance;
  CrKnnReply last = call(reach);
  if (!last.ids && !backend.is_exact()) {
    out.stats.fallback = true;
    ExactBackend exact(index.data);
    last = exact.answer(q, params.k, params.c, reach);
    ++out.stats.backend_calls;
    out.stats.candidates_scanned += last.scanned;
  }
  if (!last.ids) throw std::logic_error("query: the final radius holds fewer than k points");
  out.ids = std::move(*last.ids);
  return out;
}

QueryOutcome query(const Hdg& index, Coords q, const QueryParams& params, const CrKnnBackend& backend) {
  check_query(index, q, params);
  QueryStats stats;
  const NodeId stop = descend(index, q, params.k, &stats);
  const NodeId nav = navigate(index, stop, q, &stats);
  QueryOutcome out = answer(index, nav, q, params, backend);
  const std::size_t calls = out.stats.backend_calls, scanned = out.stats.candidates_scanned;
  const bool fallback = out.stats.fallback;
  out.stats = stats;
  out.stats.backend_calls = calls;
  out.stats.candidates_scanned = scanned;
  out.stats.fallback = fallback;
  return out;
}

QueryOutcome query(const Hdg& index, Coords q, const QueryParams& params) {
  ExactBackend exact(index.data);
  return query(index, q, params, exact);
}

}  // namespace hdgknn
