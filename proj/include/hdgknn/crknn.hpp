#pragma once

// (c,r)-kNN oracles: given q, k, c and r, return k points inside S(q, c*r)
// when S(q, r) holds at least k points, and report "empty" when S(q, c*r)
// holds fewer than k.

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string_view>
#include <span>
#include <vector>

#include "hdgknn/core.hpp"

namespace hdgknn {

struct CrKnnReply {
  std::optional<std::vector<PointId>> ids;  // nullopt means Empty
  std::size_t scanned = 0;                  // distinct candidates examined
};

class CrKnnBackend {
 public:
  virtual ~CrKnnBackend() = default;
  virtual CrKnnReply answer(Coords q, std::size_t k, double c, double r) const = 0;
  virtual std::string_view name() const = 0;
  virtual bool is_exact() const { return false; }
};

/// Linear scan over the dataset; see exact_crknn for the answer rule.
class ExactBackend final : public CrKnnBackend {
 public:
  explicit ExactBackend(const Dataset& data) : data_(data) {}
  CrKnnReply answer(Coords q, std::size_t k, double c, double r) const override;
  std::string_view name() const override { return "exact"; }
  bool is_exact() const override { return true; }

 private:
  const Dataset& data_;
};

/// Probability that two points at distance s share a bucket of one
/// quantized Gaussian projection with width w, by numerical integration.
double collision_probability(double w, double s);

struct LshParams {
  double w = 0.0;
  std::uint32_t M = 0;  // projections per composite key
  std::uint32_t L = 0;  // tables
  double rho = 0.0;
  double p1 = 0.0;  // collision probability at distance r
  double p2 = 0.0;  // ... at distance c*r
  std::uint64_t seed = 0;
};

/// p1, p2 from collision_probability; rho = ln(1/p1)/ln(1/p2);
/// M = ceil(log_{1/p2} n); L = ceil(k n^rho).
LshParams derive_params(std::size_t n, std::size_t k, double c, double r, double w, std::uint64_t seed = 0);

/// L hash tables for one radius.
class LshLevel {
 public:
  LshLevel(const Dataset& data, std::size_t k, double c, double radius, double w_factor, std::uint64_t seed);

  double radius() const noexcept { return radius_; }
  const LshParams& params() const noexcept { return params_; }

  /// Quantized projections h_1..h_M of table j.
  std::vector<std::int64_t> composite_key(std::size_t table, Coords p) const;
  /// Ids stored under the bucket `p` hashes to in `table`.
  std::span<const PointId> bucket(std::size_t table, Coords p) const;

  /// Probes the L buckets of q, keeping distinct candidates within c*r.
  /// Gives up (Empty) after 3L distinct candidates without k hits.
  CrKnnReply answer(Coords q, std::size_t k, double c, double r) const;

 private:
  std::uint64_t bucket_hash(std::size_t table, Coords p) const;

  const Dataset& data_;
  double radius_;
  LshParams params_;
  std::vector<double> proj_;    // L*M*d
  std::vector<double> offset_;  // L*M, uniform in [0, w)
  std::vector<std::uint64_t> keys_;  // L*n, sorted within each table
  std::vector<PointId> ids_;         // aligned with keys_
};

struct LshOptions {
  double w_factor = 4.0;  // bucket width = w_factor * level radius
  std::uint64_t seed = 0;
  std::size_t max_tables = 200000;  // cap on L summed over provisioned levels
};

/// Eagerly provisioned levels for a fixed (k, c).
class LshIndex {
 public:
  /// `radii` must increase geometrically by the factor c.
  LshIndex(const Dataset& data, std::size_t k, double c, std::vector<double> radii, LshOptions opts = {});

  std::size_t level_count() const noexcept { return levels_.size(); }
  const LshLevel& level(std::size_t i) const { return *levels_.at(i); }
  /// Index of the smallest level radius >= r (the last level when r exceeds
  /// them all).
  std::size_t level_for(double r) const;

  CrKnnReply answer(Coords q, std::size_t k, double c, double r) const;

  /// Wall-clock seconds spent populating the tables.
  double build_seconds() const noexcept { return build_seconds_; }
  /// Requests whose radius fell strictly between levels and were served by
  /// the next level up.
  std::size_t rounded_requests() const noexcept { return rounded_.load(); }

 private:
  const Dataset& data_;
  std::size_t k_;
  double c_;
  std::vector<std::unique_ptr<LshLevel>> levels_;
  double build_seconds_ = 0.0;
  mutable std::atomic<std::size_t> rounded_{0};
};

LshIndex provision(const Dataset& data, std::size_t k, double c, std::vector<double> radii, LshOptions opts = {});

/// LSH backend whose levels sit on the grid base * c^t (t any integer) and
/// are built on first use. A request for radius r is served by the level
/// ceil(log_c(r / base)); the c*r acceptance test always uses the caller's r.
class LshBackend final : public CrKnnBackend {
 public:
  LshBackend(const Dataset& data, std::size_t k, double c, double base_radius, LshOptions opts = {});

  CrKnnReply answer(Coords q, std::size_t k, double c, double r) const override;
  std::string_view name() const override { return "lsh"; }

  int grid_index(double r) const;
  double grid_radius(int t) const;
  const LshLevel& level(int t) const;
  std::size_t built_levels() const;

 private:
  struct Slot {
    std::once_flag once;
    std::unique_ptr<LshLevel> level;
  };

  const Dataset& data_;
  std::size_t k_;
  double c_;
  double base_;
  LshOptions opts_;
  int min_grid_;
  mutable std::mutex mu_;
  mutable std::map<int, std::shared_ptr<Slot>> slots_;
  mutable std::size_t tables_used_ = 0;
};

}  // namespace hdgknn
