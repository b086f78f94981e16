#pragma once

// Synthetic data and the benchmark harness behind `hdgknn bench`.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "hdgknn/crknn.hpp"
#include "hdgknn/hdg.hpp"
#include "hdgknn/query.hpp"

namespace hdgknn {

/// Homogeneous Poisson process on [0, side]^d conditioned on n points, i.e.
/// n i.i.d. uniform points.
Dataset gen_poisson(std::size_t n, std::size_t d, double side, std::uint64_t seed);

enum class BackendKind { Exact, Lsh };
BackendKind parse_backend(const std::string& name);
std::string_view to_string(BackendKind kind);

/// Backend over the index's points. The LSH grid is anchored at the root
/// sphere's diameter.
std::unique_ptr<CrKnnBackend> make_backend(const Hdg& index, BackendKind kind, const QueryParams& params,
                                           std::uint64_t seed, LshOptions lsh = {});

struct BenchConfig {
  std::size_t queries = 100;
  QueryParams params;
  BackendKind backend = BackendKind::Exact;
  std::uint64_t seed = 0;  // query positions and LSH hashing
  std::size_t threads = 1;
};

struct BenchRecord {
  std::size_t query_id = 0;
  std::vector<double> q;
  std::vector<PointId> ids;
  std::uint32_t loop_index = 0;
  GuaranteePath path = GuaranteePath::Recall;
  double recall = 0.0;          // |ids ∩ exact kNN| / k
  double max_distance = 0.0;    // max over ids of D(q, p)
  double t_k = 0.0;             // exact k-th neighbour distance
  double distance_ratio = 0.0;  // max_distance / t_k
  bool distance_ok = false;     // max_distance <= c * t_k
  bool recall_ok = false;       // recall >= delta
  bool kann_ok = false;         // distance_ok || recall_ok
  bool fallback = false;
  std::size_t descent_nodes = 0;
  std::size_t navigation_nodes = 0;
  std::size_t backend_calls = 0;
  std::size_t candidates_scanned = 0;
  double latency_us = 0.0;  // wall clock; kept out of the report file
};

struct BenchAggregate {
  std::size_t queries = 0;
  std::size_t recall_path = 0;
  std::size_t distance_path = 0;
  std::size_t fallbacks = 0;
  double mean_recall = 0.0;
  double recall_p10 = 0.0, recall_p50 = 0.0, recall_p90 = 0.0;
  double recall_path_mean_recall = 0.0;
  double recall_path_fraction_delta = 0.0;    // among recall-path queries, recall >= delta
  double distance_path_fraction_ok = 0.0;     // among distance-path queries, distance_ok
  double fraction_kann = 0.0;                 // distance_ok || recall_ok
  double max_distance_ratio = 0.0;
  double mean_descent_nodes = 0.0;
  double mean_navigation_nodes = 0.0;
  double mean_backend_calls = 0.0;
  double mean_candidates_scanned = 0.0;

  friend bool operator==(const BenchAggregate&, const BenchAggregate&) = default;
};

BenchAggregate aggregate(const std::vector<BenchRecord>& records, double delta);

struct BenchReport {
  BenchConfig config;
  std::uint64_t build_seed = 0;
  std::size_t n = 0, dim = 0;
  std::vector<std::size_t> layer_max_degrees;
  std::vector<BenchRecord> records;
  BenchAggregate summary;
};

/// Evaluates one query against the exact kNN of q.
BenchRecord evaluate(const Hdg& index, std::size_t query_id, std::vector<double> q, const QueryOutcome& outcome,
                     const QueryParams& params);

BenchReport run_bench(const Hdg& index, const BenchConfig& config);

/// One JSON object per line: a header, one line per query in id order, and a
/// trailing aggregate. Contains no wall-clock values.
void write_report(std::ostream& out, const BenchReport& report);
BenchReport read_report(std::istream& in);

/// Per-query latency as "query_id latency_us" lines.
void write_timings(std::ostream& out, const BenchReport& report);

}  // namespace hdgknn
