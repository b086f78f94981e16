#include "hdgknn/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

#include "hdgknn/detail/seeding.hpp"
#include "hdgknn/detail/small_linalg.hpp"

namespace hdgknn {

Dataset::Dataset(std::size_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0) throw std::invalid_argument("dataset dimension must be >= 1");
  if (coords_.size() % dim_ != 0)
    throw std::invalid_argument("coordinate count is not a multiple of the dimension");
  for (double v : coords_) {
    if (!std::isfinite(v)) throw std::invalid_argument("dataset contains a non-finite coordinate");
  }
}

Dataset Dataset::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("from_rows: no points");
  const std::size_t d = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * d);
  for (const auto& r : rows) {
    if (r.size() != d) throw std::invalid_argument("from_rows: ragged rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return Dataset(d, std::move(flat));
}

double Dataset::bbox_diameter() const {
  if (empty()) return 0.0;
  double s = 0.0;
  for (std::size_t j = 0; j < dim_; ++j) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < size(); ++i) {
      lo = std::min(lo, coords_[i * dim_ + j]);
      hi = std::max(hi, coords_[i * dim_ + j]);
    }
    s += (hi - lo) * (hi - lo);
  }
  return std::sqrt(s);
}

bool Dataset::has_distinct_coordinates() const {
  const std::size_t n = size();
  std::vector<double> col(n);
  for (std::size_t j = 0; j < dim_; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = coords_[i * dim_ + j];
    std::sort(col.begin(), col.end());
    if (std::adjacent_find(col.begin(), col.end()) != col.end()) return false;
  }
  return true;
}

Dataset Dataset::jittered(std::uint64_t seed) const {
  Dataset out = *this;
  out.jitter_seed_ = seed;
  if (size() <= 1) return out;

  double eta = 1e-9 * bbox_diameter();
  if (eta == 0.0) {
    double mag = 1.0;
    for (double v : coords_) mag = std::max(mag, std::abs(v));
    eta = 1e-9 * mag;
  }
  for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
    std::mt19937_64 rng(detail::derive_seed(seed, attempt));
    std::uniform_real_distribution<double> shift(-eta, eta);
    for (std::size_t i = 0; i < coords_.size(); ++i) out.coords_[i] = coords_[i] + shift(rng);
    if (out.has_distinct_coordinates()) return out;
    eta *= 2.0;
  }
  throw std::runtime_error("jitter failed to separate coordinates");
}

bool Sphere::contains(Coords p) const { return distance(p, center) <= radius; }

double distance(Coords a, Coords b) {
  if (a.size() != b.size()) throw std::invalid_argument("distance: dimension mismatch");
  return std::sqrt(squared_distance(a, b));
}

KnnResult exact_knn(const Dataset& data, Coords q, std::size_t k) {
  if (q.size() != data.dim()) throw std::invalid_argument("exact_knn: dimension mismatch");
  if (k == 0 || k > data.size()) throw std::invalid_argument("exact_knn: k must be in [1, n]");
  std::vector<std::pair<double, PointId>> all(data.size());
  for (PointId i = 0; i < data.size(); ++i) all[i] = {squared_distance(data.point(i), q), i};
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end());
  KnnResult res;
  res.ids.reserve(k);
  for (std::size_t i = 0; i < k; ++i) res.ids.push_back(all[i].second);
  res.t_k = std::sqrt(all[k - 1].first);
  return res;
}

namespace {

// Smallest sphere whose boundary passes through every point in `support`,
// with its center in their affine hull. Affinely dependent supports drop the
// last point.
Sphere circumsphere_in_hull(const Dataset& data, const std::vector<PointId>& support) {
  const std::size_t d = data.dim();
  Sphere s;
  if (support.empty()) {
    s.center.assign(d, 0.0);
    s.radius = -1.0;
    return s;
  }
  const Coords p0 = data.point(support[0]);
  if (support.size() == 1) {
    s.center.assign(p0.begin(), p0.end());
    return s;
  }
  const std::size_t m = support.size() - 1;
  std::vector<std::vector<double>> v(m, std::vector<double>(d));
  for (std::size_t j = 0; j < m; ++j) {
    const Coords pj = data.point(support[j + 1]);
    for (std::size_t t = 0; t < d; ++t) v[j][t] = pj[t] - p0[t];
  }
  std::vector<double> g(m * m), b(m);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t l = 0; l < m; ++l)
      g[j * m + l] = 2.0 * std::inner_product(v[j].begin(), v[j].end(), v[l].begin(), 0.0);
    b[j] = std::inner_product(v[j].begin(), v[j].end(), v[j].begin(), 0.0);
  }
  auto lambda = detail::solve(g, b, m, 1e-12);
  if (!lambda) {
    std::vector<PointId> reduced(support.begin(), support.end() - 1);
    return circumsphere_in_hull(data, reduced);
  }
  s.center.assign(p0.begin(), p0.end());
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t t = 0; t < d; ++t) s.center[t] += (*lambda)[j] * v[j][t];
  for (PointId id : support) s.radius = std::max(s.radius, distance(data.point(id), s.center));
  return s;
}

bool outside(const Sphere& s, Coords p) {
  if (s.radius < 0.0) return true;
  return distance(p, s.center) > s.radius * (1.0 + 1e-12) + 1e-300;
}

struct Welzl {
  const Dataset& data;
  std::vector<PointId> order;
  std::vector<PointId> support;

  Sphere run(std::size_t end) {
    Sphere ball = circumsphere_in_hull(data, support);
    if (support.size() == data.dim() + 1) return ball;
    for (std::size_t i = 0; i < end; ++i) {
      const PointId p = order[i];
      if (!outside(ball, data.point(p))) continue;
      support.push_back(p);
      ball = run(i);
      support.pop_back();
      // move-to-front
      std::rotate(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(i),
                  order.begin() + static_cast<std::ptrdiff_t>(i) + 1);
    }
    return ball;
  }
};

}  // namespace

Sphere exact_mes(const Dataset& data, std::span<const PointId> ids) {
  if (ids.empty()) throw std::invalid_argument("exact_mes: empty point set");
  Welzl w{data, std::vector<PointId>(ids.begin(), ids.end()), {}};
  Sphere s = w.run(w.order.size());
  // Tighten to the farthest point so the enclosure is exact.
  double r = 0.0;
  for (PointId id : ids) r = std::max(r, distance(data.point(id), s.center));
  s.radius = r;
  return s;
}

Sphere exact_mes(const Dataset& data) {
  std::vector<PointId> ids(data.size());
  std::iota(ids.begin(), ids.end(), 0);
  return exact_mes(data, ids);
}

std::optional<std::vector<PointId>> exact_crknn(const Dataset& data, Coords q, std::size_t k,
                                                double c, double r) {
  if (q.size() != data.dim()) throw std::invalid_argument("exact_crknn: dimension mismatch");
  const double outer = c * r;
  std::vector<PointId> hits;
  hits.reserve(k);
  for (PointId i = 0; i < data.size() && hits.size() < k; ++i) {
    if (distance(data.point(i), q) <= outer) hits.push_back(i);
  }
  if (k == 0 || hits.size() < k) return std::nullopt;
  return hits;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Dataset read_dataset_text(std::istream& in) {
  auto offset = [&in]() -> std::size_t {
    auto pos = in.tellg();
    return pos < 0 ? 0 : static_cast<std::size_t>(pos);
  };
  long long d = 0, n = 0;
  if (!(in >> d >> n)) throw FormatError("dataset header must be \"d n\"", offset());
  if (d < 1) throw FormatError("dataset dimension must be >= 1", offset());
  if (n < 1) throw FormatError("dataset must contain at least one point", offset());
  std::vector<double> coords(static_cast<std::size_t>(d * n));
  for (auto& v : coords) {
    std::string tok;
    if (!(in >> tok)) throw FormatError("dataset truncated", offset());
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (*first == '+') ++first;
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v))
      throw FormatError("bad coordinate \"" + tok + "\"", offset());
  }
  std::string extra;
  if (in >> extra) throw FormatError("trailing data after " + std::to_string(n) + " points", offset());
  return Dataset(static_cast<std::size_t>(d), std::move(coords));
}

void write_dataset_text(std::ostream& out, const Dataset& data) {
  out << data.dim() << ' ' << data.size() << '\n';
  for (PointId i = 0; i < data.size(); ++i) {
    const Coords p = data.point(i);
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (j) out << ' ';
      out << format_double(p[j]);
    }
    out << '\n';
  }
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset " + path);
  return read_dataset_text(in);
}

void save_dataset(const std::string& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write dataset " + path);
  write_dataset_text(out, data);
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace hdgknn
