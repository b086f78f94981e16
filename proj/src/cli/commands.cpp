#include "hdgknn/commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <optional>
#include <fstream>
#include <ostream>

#include "CLI11.hpp"
#include "hdgknn/bench.hpp"
#include "hdgknn/hdg.hpp"
#include "hdgknn/query.hpp"

namespace hdgknn {

std::vector<double> parse_point(const std::string& text) {
  std::vector<double> out;
  const char* p = text.data();
  const char* end = p + text.size();
  while (true) {
    while (p < end && *p == ' ') ++p;
    double v = 0.0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc() || !std::isfinite(v)) throw UsageError("--q: expected comma-separated numbers, got '" + text + "'");
    out.push_back(v);
    p = next;
    while (p < end && *p == ' ') ++p;
    if (p == end) break;
    if (*p != ',') throw UsageError("--q: expected comma-separated numbers, got '" + text + "'");
    ++p;
  }
  return out;
}

namespace {

struct GenArgs {
  std::size_t n = 0, d = 0;
  double side = 1.0;
  std::uint64_t seed = 0;
  std::string output;
};

struct BuildArgs {
  std::string input, output;
  double epsilon = 0.1;
  std::uint64_t seed = 0;
};

struct QueryArgs {
  std::string index, q;
  std::size_t k = 1;
  double c = 2.0, delta = 0.9;
  std::string backend = "exact";
  std::optional<std::uint64_t> seed;
};

struct BenchArgs {
  std::string index, report, timings;
  std::size_t queries = 0, k = 1, threads = 1;
  double c = 2.0, delta = 0.9;
  std::string backend = "exact";
  std::optional<std::uint64_t> seed;
};

void check_query_params(std::size_t k, double c, double delta) {
  if (k < 1) throw UsageError("--k must be at least 1");
  if (!(c > 1.0) || !std::isfinite(c)) throw UsageError("--c must exceed 1");
  if (!(delta > 0.0 && delta <= 1.0)) throw UsageError("--delta must lie in (0, 1]");
}

BackendKind backend_flag(const std::string& name) {
  try {
    return parse_backend(name);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

int do_gen(const GenArgs& a, std::ostream& out) {
  if (a.n < 1) throw UsageError("--n must be at least 1");
  if (a.d < 1 || a.d > kMaxDelaunayDim) throw UsageError("--d must lie in [1, 6]");
  if (!(a.side > 0.0) || !std::isfinite(a.side)) throw UsageError("--side must be positive");
  const Dataset data = gen_poisson(a.n, a.d, a.side, a.seed);
  save_dataset(a.output, data);
  out << "wrote " << a.n << " points in " << a.d << "d to " << a.output << " (data seed " << a.seed << ")\n";
  return kExitOk;
}

int do_build(const BuildArgs& a, std::ostream& out, std::ostream& err) {
  if (!(a.epsilon > 0.0 && a.epsilon < 1.0)) throw UsageError("--epsilon must lie in (0, 1)");
  const Dataset data = load_dataset(a.input);
  if (data.dim() < 1 || data.dim() > kMaxDelaunayDim) throw UsageError("dataset dimension must lie in [1, 6]");
  const auto t0 = std::chrono::steady_clock::now();
  const Hdg index = build_index(data, BuildParams{a.epsilon, a.seed});
  const auto t1 = std::chrono::steady_clock::now();
  save_index_file(index, a.output);
  out << "indexed " << index.size() << " points in " << index.dim() << "d: " << index.nodes.size() << " nodes, "
      << index.layers.size() << " layers (algorithm seed " << a.seed << ")\n";
  err << "build time " << format_double(std::chrono::duration<double>(t1 - t0).count()) << " s\n";
  return kExitOk;
}

int do_validate(const std::string& path, std::ostream& out) {
  const Hdg index = load_index_file(path);
  const ValidationReport report = validate_index(index);
  for (const auto& check : report.checks) {
    out << (check.passed ? "PASS " : "FAIL ") << check.name;
    if (!check.detail.empty()) out << ": " << check.detail;
    out << '\n';
  }
  out << (report.ok() ? "index valid\n" : "index INVALID\n");
  return report.ok() ? kExitOk : kExitFailure;
}

int do_query(const QueryArgs& a, std::ostream& out) {
  check_query_params(a.k, a.c, a.delta);
  const BackendKind kind = backend_flag(a.backend);
  const std::vector<double> q = parse_point(a.q);
  const Hdg index = load_index_file(a.index);
  if (q.size() != index.dim())
    throw UsageError("--q has " + std::to_string(q.size()) + " coordinates, index has dimension " +
                     std::to_string(index.dim()));
  if (a.k > index.size())
    throw UsageError("--k " + std::to_string(a.k) + " exceeds the number of points " + std::to_string(index.size()));
  const QueryParams params{a.k, a.c, a.delta};
  const std::uint64_t seed = a.seed.value_or(index.params.seed);
  auto backend = make_backend(index, kind, params, seed);
  const QueryOutcome res = query(index, q, params, *backend);

  out << "ids";
  for (PointId id : res.ids) out << ' ' << id;
  out << '\n';
  out << "path " << to_string(res.path) << '\n';
  out << "loop_index " << res.loop_index << '\n';
  out << "backend " << backend->name() << (res.stats.fallback ? " (exact fallback)" : "") << '\n';
  out << "descent_nodes " << res.stats.descent_nodes << '\n';
  out << "navigation_nodes " << res.stats.navigation_nodes << '\n';
  out << "backend_calls " << res.stats.backend_calls << '\n';
  out << "candidates_scanned " << res.stats.candidates_scanned << '\n';
  return kExitOk;
}

int do_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  check_query_params(a.k, a.c, a.delta);
  if (a.queries < 1) throw UsageError("--queries must be at least 1");
  if (a.threads < 1) throw UsageError("--threads must be at least 1");
  const BackendKind kind = backend_flag(a.backend);
  const Hdg index = load_index_file(a.index);
  if (a.k > index.size())
    throw UsageError("--k " + std::to_string(a.k) + " exceeds the number of points " + std::to_string(index.size()));

  BenchConfig cfg;
  cfg.queries = a.queries;
  cfg.params = QueryParams{a.k, a.c, a.delta};
  cfg.backend = kind;
  cfg.seed = a.seed.value_or(index.params.seed);
  cfg.threads = a.threads;
  const BenchReport report = run_bench(index, cfg);

  std::ofstream file(a.report, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open '" + a.report + "' for writing");
  write_report(file, report);
  if (!file.flush()) throw std::runtime_error("failed writing '" + a.report + "'");
  if (!a.timings.empty()) {
    std::ofstream t(a.timings);
    if (!t) throw std::runtime_error("cannot open '" + a.timings + "' for writing");
    write_timings(t, report);
  }

  const BenchAggregate& s = report.summary;
  out << "queries " << s.queries << " (recall path " << s.recall_path << ", distance path " << s.distance_path
      << ")\n";
  out << "mean recall " << format_double(s.mean_recall) << '\n';
  out << "distance criterion on distance path " << format_double(s.distance_path_fraction_ok) << '\n';
  out << "kANN satisfied " << format_double(s.fraction_kann) << '\n';
  if (s.fallbacks) err << s.fallbacks << " queries fell back to the exact scan\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Approximate k-nearest-neighbour search over a hierarchical Delaunay graph", "hdgknn"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate n uniform points in [0, side]^d");
  gen_cmd->add_option("--n", gen.n, "Number of points")->required();
  gen_cmd->add_option("--d", gen.d, "Dimension (1..6)")->required();
  gen_cmd->add_option("--side", gen.side, "Side length of the hypercube");
  gen_cmd->add_option("--seed", gen.seed, "Data seed");
  gen_cmd->add_option("--output", gen.output, "Dataset file")->required();

  BuildArgs build;
  auto* build_cmd = app.add_subcommand("build", "Build an index from a dataset file");
  build_cmd->add_option("--input", build.input, "Dataset file")->required();
  build_cmd->add_option("--output", build.output, "Index file")->required();
  build_cmd->add_option("--epsilon", build.epsilon, "Enclosing-sphere approximation");
  build_cmd->add_option("--seed", build.seed, "Algorithm seed");

  std::string validate_index_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check an index's structural invariants");
  validate_cmd->add_option("--index", validate_index_path, "Index file")->required();

  QueryArgs qa;
  auto* query_cmd = app.add_subcommand("query", "Answer one k-nearest-neighbour query");
  query_cmd->add_option("--index", qa.index, "Index file")->required();
  query_cmd->add_option("--q", qa.q, "Query point x1,...,xd")->required();
  query_cmd->add_option("--k", qa.k, "Number of neighbours")->required();
  query_cmd->add_option("--c", qa.c, "Approximation ratio (> 1)")->required();
  query_cmd->add_option("--delta", qa.delta, "Recall target in (0, 1]")->required();
  query_cmd->add_option("--backend", qa.backend, "exact or lsh");
  query_cmd->add_option("--seed", qa.seed, "LSH seed (defaults to the index's algorithm seed)");

  BenchArgs ba;
  auto* bench_cmd = app.add_subcommand("bench", "Run random queries and write a report");
  bench_cmd->add_option("--index", ba.index, "Index file")->required();
  bench_cmd->add_option("--queries", ba.queries, "Number of queries")->required();
  bench_cmd->add_option("--k", ba.k, "Number of neighbours")->required();
  bench_cmd->add_option("--c", ba.c, "Approximation ratio (> 1)")->required();
  bench_cmd->add_option("--delta", ba.delta, "Recall target in (0, 1]")->required();
  bench_cmd->add_option("--backend", ba.backend, "exact or lsh")->required();
  bench_cmd->add_option("--report", ba.report, "Report file")->required();
  bench_cmd->add_option("--seed", ba.seed, "Query and LSH seed (defaults to the index's algorithm seed)");
  bench_cmd->add_option("--threads", ba.threads, "Worker threads");
  bench_cmd->add_option("--timings", ba.timings, "Optional per-query latency file");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*gen_cmd) return do_gen(gen, out);
    if (*build_cmd) return do_build(build, out, err);
    if (*validate_cmd) return do_validate(validate_index_path, out);
    if (*query_cmd) return do_query(qa, out);
    if (*bench_cmd) return do_bench(ba, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace hdgknn
