#pragma once

// Delaunay triangulation in d dimensions (incremental Bowyer-Watson) and an
// independent empty-circumsphere verifier.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hdgknn/core.hpp"

namespace hdgknn {

inline constexpr std::size_t kMaxDelaunayDim = 6;

struct DtGraph {
  std::size_t dim = 0;
  /// Sorted neighbour lists, indexed by site.
  std::vector<std::vector<std::uint32_t>> adjacency;
  /// Each simplex is d+1 sorted site indices.
  std::vector<std::vector<std::uint32_t>> simplices;

  std::size_t size() const noexcept { return adjacency.size(); }
  std::size_t edge_count() const;
};

/// Triangulates `sites`. Sets of at most d+1 sites yield the complete graph;
/// d == 1 yields the path over sorted sites. Sites whose predicates come out
/// ambiguous are nudged (seeded by `seed`) inside the builder only.
/// Throws ConfigError for d > kMaxDelaunayDim.
DtGraph build_delaunay(const Dataset& sites, std::uint64_t seed = 0);

/// Circumsphere of a full-dimensional simplex; nullopt when degenerate.
std::optional<Sphere> circumsphere(const Dataset& sites, std::span<const std::uint32_t> simplex);

struct EmptySphereViolation {
  enum class Kind { SiteInside, DegenerateSimplex, EdgeWithoutSimplex, AsymmetricEdge };
  Kind kind;
  std::size_t simplex = 0;   // SiteInside, DegenerateSimplex
  std::uint32_t site = 0;    // SiteInside: the intruder
  std::pair<std::uint32_t, std::uint32_t> edge{};  // edge kinds
};

struct EmptySphereReport {
  bool ok = true;
  std::vector<EmptySphereViolation> violations;
  /// d == 2 only: claimed edges for which no empty circle passes through
  /// both endpoints.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> bad_edges;
};

/// Checks that no site lies strictly inside any simplex circumsphere
/// (distance < radius - 1e-9 * radius), that adjacency is symmetric and that
/// every edge belongs to a simplex. In the plane each edge is additionally
/// tested for an empty circle through its endpoints.
EmptySphereReport verify_empty_sphere(const Dataset& sites, const DtGraph& graph);

/// True when some circle through sites a and b holds no other site strictly
/// inside. Planar sites only.
bool admits_empty_circle(const Dataset& sites, std::uint32_t a, std::uint32_t b);

std::size_t max_degree(const DtGraph& graph);

}  // namespace hdgknn
