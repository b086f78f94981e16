#include "hdgknn/crknn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "hdgknn/detail/seeding.hpp"

namespace hdgknn {

CrKnnReply ExactBackend::answer(Coords q, std::size_t k, double c, double r) const {
  if (q.size() != data_.dim()) throw std::invalid_argument("exact backend: dimension mismatch");
  CrKnnReply reply;
  const double outer = c * r;
  std::vector<PointId> hits;
  hits.reserve(k);
  for (PointId i = 0; i < data_.size() && hits.size() < k; ++i) {
    ++reply.scanned;
    if (distance(data_.point(i), q) <= outer) hits.push_back(i);
  }
  if (k > 0 && hits.size() == k) reply.ids = std::move(hits);
  return reply;
}

double collision_probability(double w, double s) {
  if (!(w > 0.0)) throw std::invalid_argument("collision_probability: w must be positive");
  if (s < 0.0) throw std::invalid_argument("collision_probability: negative distance");
  if (s == 0.0) return 1.0;
  // p = int_0^u 2 phi(x) (1 - x/u) dx, u = w/s, phi the standard normal pdf.
  const double u = w / s;
  const double upper = std::min(u, 40.0);
  constexpr int kPanels = 4096;
  const double h = upper / kPanels;
  auto f = [u](double x) { return 2.0 * std::exp(-0.5 * x * x) * std::numbers::inv_sqrtpi / std::numbers::sqrt2 * (1.0 - x / u); };
  double acc = f(0.0) + f(upper);
  for (int i = 1; i < kPanels; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return std::clamp(acc * h / 3.0, 0.0, 1.0);
}

LshParams derive_params(std::size_t n, std::size_t k, double c, double r, double w, std::uint64_t seed) {
  if (!(c > 1.0)) throw std::invalid_argument("derive_params: c must exceed 1");
  if (!(r > 0.0) || !(w > 0.0)) throw std::invalid_argument("derive_params: r and w must be positive");
  if (n == 0 || k == 0) throw std::invalid_argument("derive_params: n and k must be positive");
  LshParams p;
  p.w = w;
  p.seed = seed;
  p.p1 = collision_probability(w, r);
  p.p2 = collision_probability(w, c * r);
  if (!(p.p2 < p.p1) || p.p1 >= 1.0 || p.p2 <= 0.0)
    throw std::logic_error("derive_params: collision probabilities are not locality sensitive");
  p.rho = std::log(1.0 / p.p1) / std::log(1.0 / p.p2);
  const double nn = static_cast<double>(n);
  p.M = static_cast<std::uint32_t>(std::max(1.0, std::ceil(std::log(nn) / std::log(1.0 / p.p2))));
  p.L = static_cast<std::uint32_t>(std::max(1.0, std::ceil(static_cast<double>(k) * std::pow(nn, p.rho))));
  return p;
}

LshLevel::LshLevel(const Dataset& data, std::size_t k, double c, double radius, double w_factor, std::uint64_t seed)
    : data_(data), radius_(radius) {
  params_ = derive_params(data.size(), k, c, radius, w_factor * radius, seed);
  const std::size_t d = data.dim(), L = params_.L, M = params_.M;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, params_.w);
  proj_.resize(L * M * d);
  offset_.resize(L * M);
  for (auto& v : proj_) v = gauss(rng);
  for (auto& v : offset_) v = unif(rng);

  // Each table is n (hash, id) entries sorted by hash.
  const std::size_t n = data.size();
  keys_.resize(L * n);
  ids_.resize(L * n);
  std::vector<std::pair<std::uint64_t, PointId>> entries(n);
  for (std::size_t j = 0; j < L; ++j) {
    for (PointId i = 0; i < n; ++i) entries[i] = {bucket_hash(j, data.point(i)), i};
    std::sort(entries.begin(), entries.end());
    for (std::size_t i = 0; i < n; ++i) {
      keys_[j * n + i] = entries[i].first;
      ids_[j * n + i] = entries[i].second;
    }
  }
}

std::vector<std::int64_t> LshLevel::composite_key(std::size_t table, Coords p) const {
  const std::size_t d = data_.dim(), M = params_.M;
  std::vector<std::int64_t> key(M);
  for (std::size_t m = 0; m < M; ++m) {
    const double* a = &proj_[(table * M + m) * d];
    double dot = offset_[table * M + m];
    for (std::size_t t = 0; t < d; ++t) dot += a[t] * p[t];
    key[m] = static_cast<std::int64_t>(std::floor(dot / params_.w));
  }
  return key;
}

std::uint64_t LshLevel::bucket_hash(std::size_t table, Coords p) const {
  const std::size_t d = data_.dim(), M = params_.M;
  std::uint64_t h = 0x9ae16a3b2f90404fULL;
  for (std::size_t m = 0; m < M; ++m) {
    const double* a = &proj_[(table * M + m) * d];
    double dot = offset_[table * M + m];
    for (std::size_t t = 0; t < d; ++t) dot += a[t] * p[t];
    const auto v = static_cast<std::int64_t>(std::floor(dot / params_.w));
    h = detail::mix64(h ^ static_cast<std::uint64_t>(v));
  }
  return h;
}

std::span<const PointId> LshLevel::bucket(std::size_t table, Coords p) const {
  if (table >= params_.L) throw std::out_of_range("lsh level: table index");
  const std::size_t n = data_.size();
  const auto first = keys_.begin() + static_cast<std::ptrdiff_t>(table * n);
  const auto last = first + static_cast<std::ptrdiff_t>(n);
  const auto [lo, hi] = std::equal_range(first, last, bucket_hash(table, p));
  return {ids_.data() + (lo - keys_.begin()), static_cast<std::size_t>(hi - lo)};
}

CrKnnReply LshLevel::answer(Coords q, std::size_t k, double c, double r) const {
  if (q.size() != data_.dim()) throw std::invalid_argument("lsh backend: dimension mismatch");
  CrKnnReply reply;
  const double outer = c * r;
  const std::size_t budget = 3 * static_cast<std::size_t>(params_.L);
  std::unordered_set<PointId> seen;
  std::vector<PointId> hits;
  for (std::size_t j = 0; j < params_.L; ++j) {
    for (PointId id : bucket(j, q)) {
      if (!seen.insert(id).second) continue;
      ++reply.scanned;
      if (distance(data_.point(id), q) <= outer) {
        hits.push_back(id);
        if (hits.size() == k) {
          reply.ids = std::move(hits);
          return reply;
        }
      }
      if (reply.scanned >= budget) return reply;
    }
  }
  return reply;
}

LshIndex::LshIndex(const Dataset& data, std::size_t k, double c, std::vector<double> radii, LshOptions opts)
    : data_(data), k_(k), c_(c) {
  if (radii.empty()) throw std::invalid_argument("provision: no radius levels");
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] > radii[i - 1])) throw std::invalid_argument("provision: radii must be strictly increasing");
    const double ratio = radii[i] / radii[i - 1];
    if (std::abs(ratio - c) > 1e-9 * c) throw std::invalid_argument("provision: radii must grow by the factor c");
  }
  std::size_t tables = 0;
  for (double r : radii) tables += derive_params(data.size(), k, c, r, opts.w_factor * r).L;
  if (tables > opts.max_tables)
    throw std::runtime_error("provision: " + std::to_string(tables) + " tables exceed the cap of " +
                             std::to_string(opts.max_tables));
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < radii.size(); ++i)
    levels_.push_back(std::make_unique<LshLevel>(data, k, c, radii[i], opts.w_factor, detail::derive_seed(opts.seed, i)));
  build_seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::size_t LshIndex::level_for(double r) const {
  for (std::size_t i = 0; i < levels_.size(); ++i)
    if (levels_[i]->radius() >= r) return i;
  return levels_.size() - 1;
}

CrKnnReply LshIndex::answer(Coords q, std::size_t k, double c, double r) const {
  if (k != k_ || c != c_) throw std::invalid_argument("lsh index was provisioned for a different (k, c)");
  const std::size_t i = level_for(r);
  if (levels_[i]->radius() != r) rounded_.fetch_add(1, std::memory_order_relaxed);
  return levels_[i]->answer(q, k, c, r);
}

LshIndex provision(const Dataset& data, std::size_t k, double c, std::vector<double> radii, LshOptions opts) {
  return LshIndex(data, k, c, std::move(radii), opts);
}

LshBackend::LshBackend(const Dataset& data, std::size_t k, double c, double base_radius, LshOptions opts)
    : data_(data), k_(k), c_(c), base_(base_radius > 0.0 ? base_radius : 1.0), opts_(opts) {
  if (!(c > 1.0)) throw std::invalid_argument("lsh backend: c must exceed 1");
  if (k == 0 || k > data.size()) throw std::invalid_argument("lsh backend: k must be in [1, n]");
  const double span = std::ceil(std::log(std::max<double>(2.0, static_cast<double>(data.size()))) / std::log(c));
  min_grid_ = -static_cast<int>(span) - 2;
}

int LshBackend::grid_index(double r) const {
  if (!(r > 0.0)) return min_grid_;
  const double t = std::ceil(std::log(r / base_) / std::log(c_) - 1e-9);
  return std::max(min_grid_, static_cast<int>(t));
}

double LshBackend::grid_radius(int t) const { return base_ * std::pow(c_, t); }

const LshLevel& LshBackend::level(int t) const {
  std::shared_ptr<Slot> slot;
  {
    std::lock_guard lock(mu_);
    auto& s = slots_[t];
    if (!s) {
      const double r = grid_radius(t);
      const std::size_t L = derive_params(data_.size(), k_, c_, r, opts_.w_factor * r).L;
      if (tables_used_ + L > opts_.max_tables) {
        slots_.erase(t);
        throw std::runtime_error("lsh backend: provisioning radius " + format_double(r) + " would exceed the cap of " +
                                 std::to_string(opts_.max_tables) + " tables");
      }
      tables_used_ += L;
      s = std::make_shared<Slot>();
    }
    slot = s;
  }
  std::call_once(slot->once, [&] {
    slot->level = std::make_unique<LshLevel>(data_, k_, c_, grid_radius(t), opts_.w_factor,
                                             detail::derive_seed(opts_.seed, static_cast<std::uint64_t>(static_cast<std::int64_t>(t)) ^ 0x4c534800ULL));
  });
  return *slot->level;
}

std::size_t LshBackend::built_levels() const {
  std::lock_guard lock(mu_);
  return slots_.size();
}

CrKnnReply LshBackend::answer(Coords q, std::size_t k, double c, double r) const {
  if (k != k_ || c != c_) throw std::invalid_argument("lsh backend was provisioned for a different (k, c)");
  return level(grid_index(r)).answer(q, k, c, r);
}

}  // namespace hdgknn
