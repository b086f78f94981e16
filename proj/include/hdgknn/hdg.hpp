#pragma once

// Hierarchical Delaunay Graph: balanced median split tree, one approximate
// enclosing sphere per node, and a Delaunay graph over the sphere centers of
// every layer.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hdgknn/core.hpp"
#include "hdgknn/delaunay.hpp"
#include "hdgknn/split_tree.hpp"

namespace hdgknn {

inline constexpr std::uint32_t kIndexFormatVersion = 1;

class VersionError : public FormatError {
 public:
  VersionError(std::uint32_t found, std::size_t offset)
      : FormatError("unsupported index version " + std::to_string(found) + " (expected " +
                        std::to_string(kIndexFormatVersion) + ")",
                    offset) {}
};

struct BuildParams {
  double epsilon = 0.1;
  /// Algorithm seed: coordinate jitter, triangulation nudges and the default
  /// LSH seed all derive from it.
  std::uint64_t seed = 0;

  friend bool operator==(const BuildParams&, const BuildParams&) = default;
};

struct HdgNode {
  NodeId id = 0;
  std::uint32_t depth = 0;
  std::vector<PointId> point_ids;
  Sphere sphere;
  std::vector<NodeId> children;
  std::vector<NodeId> neighbors;  // same layer, sorted

  std::size_t size() const noexcept { return point_ids.size(); }
  friend bool operator==(const HdgNode&, const HdgNode&) = default;
};

struct Hdg {
  Dataset data;  // the jittered points the index was built over
  BuildParams params;
  std::vector<HdgNode> nodes;  // depth-major; node 0 is the root
  std::vector<std::vector<NodeId>> layers;
  /// Delaunay simplices of each layer, as sorted node ids.
  std::vector<std::vector<std::vector<NodeId>>> layer_simplices;

  std::size_t dim() const noexcept { return data.dim(); }
  std::size_t size() const noexcept { return data.size(); }
  const HdgNode& root() const { return nodes.front(); }

  friend bool operator==(const Hdg&, const Hdg&) = default;
};

/// Jitters `points` with params.seed, builds the balanced median split tree,
/// computes every node's sphere with ames(epsilon) and triangulates each
/// layer's centers. Throws ConfigError unless 1 <= d <= 6.
Hdg build_index(const Dataset& points, const BuildParams& params = {});

/// Sphere centers of one layer, in layer order.
Dataset layer_centers(const Hdg& index, std::size_t layer);

/// Layer graph in layer-local indices, as produced by build_delaunay.
DtGraph layer_graph(const Hdg& index, std::size_t layer);

struct ValidationCheck {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool ok() const;
};

ValidationReport validate_index(const Hdg& index);

void save_index(const Hdg& index, std::ostream& out);
/// Throws FormatError (with byte offset) on corrupt input, VersionError on a
/// version mismatch, and FormatError when `expected_dim` disagrees.
Hdg load_index(std::istream& in, std::optional<std::size_t> expected_dim = std::nullopt);

void save_index_file(const Hdg& index, const std::string& path);
Hdg load_index_file(const std::string& path, std::optional<std::size_t> expected_dim = std::nullopt);

}  // namespace hdgknn
