#pragma once

// Foundational types: datasets, spheres, the Euclidean metric and the
// brute-force oracles every index component is checked against.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hdgknn {

using PointId = std::uint32_t;
using Coords = std::span<const double>;

/// Raised when an index or dataset file cannot be decoded.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Raised for unsupported build configurations (e.g. dimension out of range).
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A set of d-dimensional points stored row-major. Point ids are row indices.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t dim, std::vector<double> coords);
  /// Coordinates that were already jittered with `jitter_seed`.
  Dataset(std::size_t dim, std::vector<double> coords, std::optional<std::uint64_t> jitter_seed)
      : Dataset(dim, std::move(coords)) {
    jitter_seed_ = jitter_seed;
  }

  static Dataset from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const noexcept { return size() == 0; }

  Coords point(PointId id) const noexcept {
    return {coords_.data() + static_cast<std::size_t>(id) * dim_, dim_};
  }
  std::span<const double> coords() const noexcept { return coords_; }

  /// Seed of the tie-breaking perturbation, if one was applied.
  std::optional<std::uint64_t> jitter_seed() const noexcept { return jitter_seed_; }

  /// Copy with every coordinate shifted uniformly in [-eta, eta],
  /// eta = 1e-9 * bounding-box diameter. Re-draws until no two points share
  /// a coordinate value in any dimension.
  Dataset jittered(std::uint64_t seed) const;

  /// True when all values in each dimension are pairwise distinct.
  bool has_distinct_coordinates() const;

  /// Length of the bounding-box diagonal.
  double bbox_diameter() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
  std::optional<std::uint64_t> jitter_seed_;
};

struct Sphere {
  std::vector<double> center;
  double radius = 0.0;

  bool contains(Coords p) const;
  friend bool operator==(const Sphere&, const Sphere&) = default;
};

/// Euclidean distance; throws std::invalid_argument on dimension mismatch.
double distance(Coords a, Coords b);

/// Unchecked squared distance for hot loops.
inline double squared_distance(Coords a, Coords b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

struct KnnResult {
  std::vector<PointId> ids;  // sorted by (distance, id)
  double t_k = 0.0;          // distance of the k-th nearest point
};

/// Exact k nearest neighbours by full scan. Throws if k == 0 or k > n.
KnnResult exact_knn(const Dataset& data, Coords q, std::size_t k);

/// Exact minimum enclosing sphere (Welzl with move-to-front). Test oracle.
Sphere exact_mes(const Dataset& data);
Sphere exact_mes(const Dataset& data, std::span<const PointId> ids);

/// Linear-scan (c,r)-kNN decision procedure. Returns the first k ids (in id
/// order) lying in the closed ball S(q, c*r) whenever that ball holds at
/// least k points, and nullopt otherwise.
std::optional<std::vector<PointId>> exact_crknn(const Dataset& data, Coords q,
                                                std::size_t k, double c, double r);

// Text format: "d n" header line, then n lines of d reals.
Dataset read_dataset_text(std::istream& in);
void write_dataset_text(std::ostream& out, const Dataset& data);
Dataset load_dataset(const std::string& path);
void save_dataset(const std::string& path, const Dataset& data);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

}  // namespace hdgknn
