#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>

#include "hdgknn/bench.hpp"
#include "hdgknn/detail/seeding.hpp"
#include "json.hpp"

namespace hdgknn {

using nlohmann::json;

BackendKind parse_backend(const std::string& name) {
  if (name == "exact") return BackendKind::Exact;
  if (name == "lsh") return BackendKind::Lsh;
  throw std::invalid_argument("unknown backend '" + name + "' (expected exact or lsh)");
}

std::string_view to_string(BackendKind kind) { return kind == BackendKind::Exact ? "exact" : "lsh"; }

std::unique_ptr<CrKnnBackend> make_backend(const Hdg& index, BackendKind kind, const QueryParams& params,
                                           std::uint64_t seed, LshOptions lsh) {
  if (kind == BackendKind::Exact) return std::make_unique<ExactBackend>(index.data);
  double base = 2.0 * index.root().sphere.radius;
  if (!(base > 0.0)) base = 1.0;
  lsh.seed = seed;
  return std::make_unique<LshBackend>(index.data, params.k, params.c, base, lsh);
}

BenchRecord evaluate(const Hdg& index, std::size_t query_id, std::vector<double> q, const QueryOutcome& outcome,
                     const QueryParams& params) {
  BenchRecord rec;
  rec.query_id = query_id;
  rec.ids = outcome.ids;
  rec.loop_index = outcome.loop_index;
  rec.path = outcome.path;
  rec.fallback = outcome.stats.fallback;
  rec.descent_nodes = outcome.stats.descent_nodes;
  rec.navigation_nodes = outcome.stats.navigation_nodes;
  rec.backend_calls = outcome.stats.backend_calls;
  rec.candidates_scanned = outcome.stats.candidates_scanned;

  const KnnResult truth = exact_knn(index.data, q, params.k);
  std::vector<PointId> a = outcome.ids, b = truth.ids;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<PointId> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  rec.recall = static_cast<double>(common.size()) / static_cast<double>(params.k);

  for (PointId id : outcome.ids) rec.max_distance = std::max(rec.max_distance, distance(q, index.data.point(id)));
  rec.t_k = truth.t_k;
  if (rec.t_k > 0.0) {
    rec.distance_ratio = rec.max_distance / rec.t_k;
  } else {
    rec.distance_ratio = rec.max_distance > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  }
  rec.distance_ok = outcome.ids.size() == params.k && rec.max_distance <= params.c * rec.t_k;
  rec.recall_ok = rec.recall >= params.delta;
  rec.kann_ok = rec.distance_ok || rec.recall_ok;
  rec.q = std::move(q);
  return rec;
}

namespace {

double percentile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return 0.0;
  const auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(sorted.size())));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::vector<std::vector<double>> bench_queries(const Dataset& data, std::size_t m, std::uint64_t seed) {
  const std::size_t d = data.dim();
  std::vector<double> lo(d, std::numeric_limits<double>::infinity()), hi(d, -std::numeric_limits<double>::infinity());
  for (PointId i = 0; i < data.size(); ++i) {
    auto p = data.point(i);
    for (std::size_t j = 0; j < d; ++j) {
      lo[j] = std::min(lo[j], p[j]);
      hi[j] = std::max(hi[j], p[j]);
    }
  }
  std::mt19937_64 rng(detail::derive_seed(seed, 0x62656e6368));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> out(m, std::vector<double>(d));
  for (auto& q : out)
    for (std::size_t j = 0; j < d; ++j) q[j] = lo[j] + (hi[j] - lo[j]) * u(rng);
  return out;
}

json record_json(const BenchRecord& r) {
  return json{{"type", "query"},
              {"query_id", r.query_id},
              {"q", r.q},
              {"ids", r.ids},
              {"loop_index", r.loop_index},
              {"path", std::string(to_string(r.path))},
              {"recall", r.recall},
              {"max_distance", r.max_distance},
              {"t_k", r.t_k},
              {"distance_ratio", std::isfinite(r.distance_ratio) ? json(r.distance_ratio) : json(nullptr)},
              {"distance_ok", r.distance_ok},
              {"recall_ok", r.recall_ok},
              {"kann_ok", r.kann_ok},
              {"fallback", r.fallback},
              {"descent_nodes", r.descent_nodes},
              {"navigation_nodes", r.navigation_nodes},
              {"backend_calls", r.backend_calls},
              {"candidates_scanned", r.candidates_scanned}};
}

BenchRecord record_from_json(const json& j) {
  BenchRecord r;
  r.query_id = j.at("query_id").get<std::size_t>();
  r.q = j.at("q").get<std::vector<double>>();
  r.ids = j.at("ids").get<std::vector<PointId>>();
  r.loop_index = j.at("loop_index").get<std::uint32_t>();
  r.path = j.at("path").get<std::string>() == "recall" ? GuaranteePath::Recall : GuaranteePath::Distance;
  r.recall = j.at("recall").get<double>();
  r.max_distance = j.at("max_distance").get<double>();
  r.t_k = j.at("t_k").get<double>();
  const json& dr = j.at("distance_ratio");
  r.distance_ratio = dr.is_null() ? std::numeric_limits<double>::infinity() : dr.get<double>();
  r.distance_ok = j.at("distance_ok").get<bool>();
  r.recall_ok = j.at("recall_ok").get<bool>();
  r.kann_ok = j.at("kann_ok").get<bool>();
  r.fallback = j.at("fallback").get<bool>();
  r.descent_nodes = j.at("descent_nodes").get<std::size_t>();
  r.navigation_nodes = j.at("navigation_nodes").get<std::size_t>();
  r.backend_calls = j.at("backend_calls").get<std::size_t>();
  r.candidates_scanned = j.at("candidates_scanned").get<std::size_t>();
  return r;
}

json summary_json(const BenchAggregate& a) {
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return json{{"type", "summary"},
              {"queries", a.queries},
              {"recall_path", a.recall_path},
              {"distance_path", a.distance_path},
              {"fallbacks", a.fallbacks},
              {"mean_recall", a.mean_recall},
              {"recall_p10", a.recall_p10},
              {"recall_p50", a.recall_p50},
              {"recall_p90", a.recall_p90},
              {"recall_path_mean_recall", a.recall_path_mean_recall},
              {"recall_path_fraction_delta", a.recall_path_fraction_delta},
              {"distance_path_fraction_ok", a.distance_path_fraction_ok},
              {"fraction_kann", a.fraction_kann},
              {"max_distance_ratio", num(a.max_distance_ratio)},
              {"mean_descent_nodes", a.mean_descent_nodes},
              {"mean_navigation_nodes", a.mean_navigation_nodes},
              {"mean_backend_calls", a.mean_backend_calls},
              {"mean_candidates_scanned", a.mean_candidates_scanned}};
}

BenchAggregate summary_from_json(const json& j) {
  BenchAggregate a;
  a.queries = j.at("queries").get<std::size_t>();
  a.recall_path = j.at("recall_path").get<std::size_t>();
  a.distance_path = j.at("distance_path").get<std::size_t>();
  a.fallbacks = j.at("fallbacks").get<std::size_t>();
  a.mean_recall = j.at("mean_recall").get<double>();
  a.recall_p10 = j.at("recall_p10").get<double>();
  a.recall_p50 = j.at("recall_p50").get<double>();
  a.recall_p90 = j.at("recall_p90").get<double>();
  a.recall_path_mean_recall = j.at("recall_path_mean_recall").get<double>();
  a.recall_path_fraction_delta = j.at("recall_path_fraction_delta").get<double>();
  a.distance_path_fraction_ok = j.at("distance_path_fraction_ok").get<double>();
  a.fraction_kann = j.at("fraction_kann").get<double>();
  const json& mr = j.at("max_distance_ratio");
  a.max_distance_ratio = mr.is_null() ? std::numeric_limits<double>::infinity() : mr.get<double>();
  a.mean_descent_nodes = j.at("mean_descent_nodes").get<double>();
  a.mean_navigation_nodes = j.at("mean_navigation_nodes").get<double>();
  a.mean_backend_calls = j.at("mean_backend_calls").get<double>();
  a.mean_candidates_scanned = j.at("mean_candidates_scanned").get<double>();
  return a;
}

}  // namespace

BenchAggregate aggregate(const std::vector<BenchRecord>& records, double delta) {
  BenchAggregate a;
  a.queries = records.size();
  if (records.empty()) return a;
  std::vector<double> recalls;
  recalls.reserve(records.size());
  double sum_recall = 0.0, sum_recall_path = 0.0;
  double sum_descent = 0.0, sum_nav = 0.0, sum_calls = 0.0, sum_scanned = 0.0;
  std::size_t recall_hits = 0, distance_hits = 0, kann = 0;
  for (const auto& r : records) {
    recalls.push_back(r.recall);
    sum_recall += r.recall;
    if (r.path == GuaranteePath::Recall) {
      ++a.recall_path;
      sum_recall_path += r.recall;
      if (r.recall >= delta) ++recall_hits;
    } else {
      ++a.distance_path;
      if (r.distance_ok) ++distance_hits;
    }
    if (r.fallback) ++a.fallbacks;
    if (r.kann_ok) ++kann;
    a.max_distance_ratio = std::max(a.max_distance_ratio, r.distance_ratio);
    sum_descent += static_cast<double>(r.descent_nodes);
    sum_nav += static_cast<double>(r.navigation_nodes);
    sum_calls += static_cast<double>(r.backend_calls);
    sum_scanned += static_cast<double>(r.candidates_scanned);
  }
  const double m = static_cast<double>(records.size());
  std::sort(recalls.begin(), recalls.end());
  a.mean_recall = sum_recall / m;
  a.recall_p10 = percentile(recalls, 0.1);
  a.recall_p50 = percentile(recalls, 0.5);
  a.recall_p90 = percentile(recalls, 0.9);
  a.recall_path_mean_recall = a.recall_path ? sum_recall_path / static_cast<double>(a.recall_path) : 0.0;
  a.recall_path_fraction_delta = ratio(recall_hits, a.recall_path);
  a.distance_path_fraction_ok = ratio(distance_hits, a.distance_path);
  a.fraction_kann = ratio(kann, records.size());
  a.mean_descent_nodes = sum_descent / m;
  a.mean_navigation_nodes = sum_nav / m;
  a.mean_backend_calls = sum_calls / m;
  a.mean_candidates_scanned = sum_scanned / m;
  return a;
}

BenchReport run_bench(const Hdg& index, const BenchConfig& config) {
  if (config.params.k == 0 || config.params.k > index.size())
    throw std::invalid_argument("bench: k must be in [1, n]");
  BenchReport report;
  report.config = config;
  report.build_seed = index.params.seed;
  report.n = index.size();
  report.dim = index.dim();
  report.layer_max_degrees.assign(index.layers.size(), 0);
  for (std::size_t l = 0; l < index.layers.size(); ++l)
    for (NodeId id : index.layers[l])
      report.layer_max_degrees[l] = std::max(report.layer_max_degrees[l], index.nodes[id].neighbors.size());

  auto queries = bench_queries(index.data, config.queries, config.seed);
  auto backend = make_backend(index, config.backend, config.params, config.seed);
  report.records.resize(queries.size());

  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < queries.size(); i += stride) {
      const auto t0 = std::chrono::steady_clock::now();
      QueryOutcome out = query(index, queries[i], config.params, *backend);
      const auto t1 = std::chrono::steady_clock::now();
      report.records[i] = evaluate(index, i, queries[i], out, config.params);
      report.records[i].latency_us = std::chrono::duration<double, std::micro>(t1 - t0).count();
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(config.threads, queries.size()));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& th : pool) th.join();
  }
  report.summary = aggregate(report.records, config.params.delta);
  return report;
}

void write_report(std::ostream& out, const BenchReport& report) {
  const json header{{"type", "header"},
                    {"n", report.n},
                    {"dim", report.dim},
                    {"build_seed", report.build_seed},
                    {"seed", report.config.seed},
                    {"queries", report.config.queries},
                    {"k", report.config.params.k},
                    {"c", report.config.params.c},
                    {"delta", report.config.params.delta},
                    {"backend", std::string(to_string(report.config.backend))},
                    {"radius_steps", radius_steps(report.n, report.config.params.c)},
                    {"layer_max_degrees", report.layer_max_degrees}};
  out << header.dump() << '\n';
  for (const auto& r : report.records) out << record_json(r).dump() << '\n';
  out << summary_json(report.summary).dump() << '\n';
}

BenchReport read_report(std::istream& in) {
  BenchReport report;
  std::string line;
  bool have_header = false, have_summary = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error(std::string("bench report: ") + e.what());
    }
    const std::string type = j.at("type").get<std::string>();
    if (type == "header") {
      have_header = true;
      report.n = j.at("n").get<std::size_t>();
      report.dim = j.at("dim").get<std::size_t>();
      report.build_seed = j.at("build_seed").get<std::uint64_t>();
      report.config.seed = j.at("seed").get<std::uint64_t>();
      report.config.queries = j.at("queries").get<std::size_t>();
      report.config.params.k = j.at("k").get<std::size_t>();
      report.config.params.c = j.at("c").get<double>();
      report.config.params.delta = j.at("delta").get<double>();
      report.config.backend = parse_backend(j.at("backend").get<std::string>());
      report.layer_max_degrees = j.at("layer_max_degrees").get<std::vector<std::size_t>>();
    } else if (type == "query") {
      report.records.push_back(record_from_json(j));
    } else if (type == "summary") {
      have_summary = true;
      report.summary = summary_from_json(j);
    } else {
      throw std::runtime_error("bench report: unknown line type '" + type + "'");
    }
  }
  if (!have_header || !have_summary) throw std::runtime_error("bench report: missing header or summary");
  return report;
}

void write_timings(std::ostream& out, const BenchReport& report) {
  for (const auto& r : report.records) out << r.query_id << ' ' << format_double(r.latency_us) << '\n';
}

}  // namespace hdgknn
