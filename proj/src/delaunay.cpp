#include "hdgknn/delaunay.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "hdgknn/detail/seeding.hpp"
#include "hdgknn/detail/small_linalg.hpp"

namespace hdgknn {

std::size_t DtGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& nb : adjacency) twice += nb.size();
  return twice / 2;
}

std::size_t max_degree(const DtGraph& graph) {
  std::size_t best = 0;
  for (const auto& nb : graph.adjacency) best = std::max(best, nb.size());
  return best;
}

namespace {

constexpr std::int32_t kInf = -1;
constexpr double kPredicateTol = 1e-12;
constexpr std::size_t kMaxWidth = kMaxDelaunayDim + 1;

enum class Verdict : std::uint8_t { No, Yes, Ambiguous };

int sign_of(double det, double bound) {
  if (std::abs(det) <= kPredicateTol * bound) return 0;
  return det > 0.0 ? 1 : -1;
}

// Sign of det[w1-w0, ..., wd-w0]; 0 when numerically ambiguous.
int orientation(const double* const* w, std::size_t d) {
  std::array<double, kMaxDelaunayDim * kMaxDelaunayDim> m{};
  double bound = 1.0;
  for (std::size_t r = 0; r < d; ++r) {
    double norm2 = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double v = w[r + 1][c] - w[0][c];
      m[r * d + c] = v;
      norm2 += v * v;
    }
    bound *= std::sqrt(norm2);
  }
  if (bound == 0.0) return 0;
  return sign_of(detail::determinant_inplace(m.data(), d), bound);
}

// Raw lifted in-sphere determinant sign: rows (w_i - p, |w_i - p|^2).
int insphere_raw(const double* const* w, const double* p, std::size_t d) {
  const std::size_t n = d + 1;
  std::array<double, kMaxWidth * kMaxWidth> m{};
  double bound = 1.0;
  for (std::size_t r = 0; r < n; ++r) {
    double lift = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double v = w[r][c] - p[c];
      m[r * n + c] = v;
      lift += v * v;
    }
    m[r * n + d] = lift;
    bound *= std::sqrt(lift + lift * lift);
  }
  if (bound == 0.0) return 0;
  return sign_of(detail::determinant_inplace(m.data(), n), bound);
}

// Maps (raw in-sphere sign * orientation sign) to "inside" for dimension d,
// calibrated on the unit simplex and its centroid.
int insphere_factor(std::size_t d) {
  static const auto table = [] {
    std::array<int, kMaxWidth + 1> t{};
    for (std::size_t dim = 1; dim <= kMaxDelaunayDim; ++dim) {
      std::vector<std::vector<double>> pts(dim + 1, std::vector<double>(dim, 0.0));
      for (std::size_t i = 0; i < dim; ++i) pts[i + 1][i] = 1.0;
      std::vector<double> centroid(dim, 1.0 / static_cast<double>(dim + 1));
      std::array<const double*, kMaxWidth> w{};
      for (std::size_t i = 0; i <= dim; ++i) w[i] = pts[i].data();
      t[dim] = insphere_raw(w.data(), centroid.data(), dim) * orientation(w.data(), dim);
    }
    return t;
  }();
  return table[d];
}

class Triangulator {
 public:
  Triangulator(const Dataset& sites, std::uint64_t seed)
      : d_(sites.dim()),
        n_(sites.size()),
        width_(sites.dim() + 1),
        pts_(sites.coords().begin(), sites.coords().end()),
        seed_(seed),
        walk_rng_(detail::derive_seed(seed, 0x77616c6b)) {
    scale_ = sites.bbox_diameter();
    if (scale_ == 0.0) scale_ = 1.0;
  }

  DtGraph run() {
    DtGraph g;
    g.dim = d_;
    g.adjacency.resize(n_);

    std::vector<std::uint32_t> first = initial_simplex();
    seed_cells(first);
    std::vector<bool> inserted(n_, false);
    for (auto v : first) inserted[v] = true;
    for (std::uint32_t p = 0; p < n_; ++p) {
      if (inserted[p]) continue;
      bool done = false;
      for (int attempt = 0; attempt < 8 && !done; ++attempt) {
        if (attempt > 0) nudge(p, attempt);
        done = insert(static_cast<std::int32_t>(p));
      }
      if (!done)
        throw std::runtime_error("build_delaunay: could not insert site " + std::to_string(p) +
                                 " (degenerate input)");
    }

    for (std::size_t c = 0; c < alive_.size(); ++c) {
      if (!alive_[c] || is_infinite(c)) continue;
      std::vector<std::uint32_t> s(width_);
      for (std::size_t i = 0; i < width_; ++i) s[i] = static_cast<std::uint32_t>(vert(c, i));
      std::sort(s.begin(), s.end());
      for (std::size_t a = 0; a < width_; ++a)
        for (std::size_t b = a + 1; b < width_; ++b) {
          g.adjacency[s[a]].push_back(s[b]);
          g.adjacency[s[b]].push_back(s[a]);
        }
      g.simplices.push_back(std::move(s));
    }
    for (auto& nb : g.adjacency) {
      std::sort(nb.begin(), nb.end());
      nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
    std::sort(g.simplices.begin(), g.simplices.end());
    return g;
  }

 private:
  struct Boundary {
    std::int32_t cell;     // conflicting cell
    std::size_t facet;     // index of the vertex replaced by the new site
    std::int32_t outside;  // non-conflicting neighbour across the facet
    std::size_t back;      // index in `outside` pointing at `cell`
  };

  const double* coord(std::int32_t v) const {
    return v == kInf ? interior_.data() : pts_.data() + static_cast<std::size_t>(v) * d_;
  }
  std::int32_t& vert(std::size_t c, std::size_t i) { return verts_[c * width_ + i]; }
  std::int32_t vert(std::size_t c, std::size_t i) const { return verts_[c * width_ + i]; }
  std::int32_t& nbr(std::size_t c, std::size_t i) { return nbrs_[c * width_ + i]; }
  std::size_t inf_slot(std::size_t c) const {
    for (std::size_t i = 0; i < width_; ++i)
      if (vert(c, i) == kInf) return i;
    return width_;
  }
  bool is_infinite(std::size_t c) const { return inf_slot(c) != width_; }

  // Orientation of cell `c` with slot `slot` replaced by `p` (p may be kInf
  // to mean the interior reference point).
  int orient_replaced(const std::int32_t* vs, std::size_t slot, const double* p) const {
    std::array<const double*, kMaxWidth> w{};
    for (std::size_t i = 0; i < width_; ++i) w[i] = i == slot ? p : coord(vs[i]);
    return orientation(w.data(), d_);
  }

  Verdict conflict(std::size_t c, std::int32_t p) {
    if (stamp_[c] == cur_stamp_) return static_cast<Verdict>(state_[c]);
    const Verdict v = conflict_uncached(c, p);
    stamp_[c] = cur_stamp_;
    state_[c] = static_cast<std::uint8_t>(v);
    return v;
  }

  Verdict conflict_uncached(std::size_t c, std::int32_t p) {
    const std::int32_t* vs = &verts_[c * width_];
    const std::size_t slot = inf_slot(c);
    if (slot == width_) {
      std::array<const double*, kMaxWidth> w{};
      for (std::size_t i = 0; i < width_; ++i) w[i] = coord(vs[i]);
      const int s = insphere_raw(w.data(), coord(p), d_) * sign_[c] * insphere_factor(d_);
      return s > 0 ? Verdict::Yes : s < 0 ? Verdict::No : Verdict::Ambiguous;
    }
    const int s = orient_replaced(vs, slot, coord(p));
    if (s == 0) return conflict(static_cast<std::size_t>(nbr(c, slot)), p);
    return s == -sign_[c] ? Verdict::Yes : Verdict::No;
  }

  std::vector<std::uint32_t> initial_simplex() {
    for (int attempt = 0; attempt < 6; ++attempt) {
      std::vector<std::uint32_t> chosen{0};
      std::vector<std::vector<double>> basis;
      const double* origin = coord(0);
      for (std::uint32_t p = 1; p < n_ && chosen.size() < width_; ++p) {
        std::vector<double> r(coord(static_cast<std::int32_t>(p)), coord(static_cast<std::int32_t>(p)) + d_);
        for (std::size_t t = 0; t < d_; ++t) r[t] -= origin[t];
        for (const auto& b : basis) {
          const double dot = std::inner_product(r.begin(), r.end(), b.begin(), 0.0);
          for (std::size_t t = 0; t < d_; ++t) r[t] -= dot * b[t];
        }
        const double norm = std::sqrt(std::inner_product(r.begin(), r.end(), r.begin(), 0.0));
        if (norm <= 1e-7 * scale_) continue;
        for (auto& v : r) v /= norm;
        basis.push_back(std::move(r));
        chosen.push_back(p);
      }
      if (chosen.size() == width_) {
        std::array<const double*, kMaxWidth> w{};
        for (std::size_t i = 0; i < width_; ++i) w[i] = coord(static_cast<std::int32_t>(chosen[i]));
        if (orientation(w.data(), d_) != 0) return chosen;
      }
      // Affinely flat input: spread every site a little and retry.
      std::mt19937_64 rng(detail::derive_seed(seed_, 0xf1a7 + static_cast<std::uint64_t>(attempt)));
      std::uniform_real_distribution<double> shift(-1e-7 * scale_, 1e-7 * scale_);
      for (auto& v : pts_) v += shift(rng);
    }
    throw std::runtime_error("build_delaunay: sites do not span the space");
  }

  std::size_t allocate() {
    if (!free_.empty()) {
      const std::size_t c = static_cast<std::size_t>(free_.back());
      free_.pop_back();
      return c;
    }
    const std::size_t c = alive_.size();
    verts_.resize(verts_.size() + width_, 0);
    nbrs_.resize(nbrs_.size() + width_, -1);
    sign_.push_back(0);
    alive_.push_back(0);
    stamp_.push_back(0);
    state_.push_back(0);
    region_mark_.push_back(0);
    return c;
  }

  // Sign used by conflict tests: orientation for finite cells, orientation
  // with the infinite vertex replaced by the interior point otherwise.
  int reference_sign(const std::int32_t* vs) const {
    std::array<const double*, kMaxWidth> w{};
    for (std::size_t i = 0; i < width_; ++i) w[i] = coord(vs[i]);
    return orientation(w.data(), d_);
  }

  struct RidgeEntry {
    std::array<std::int32_t, kMaxWidth> key;
    std::size_t cell;
    std::size_t slot;
  };

  // Pairs up facets shared by the listed cells. Returns false when some
  // facet is not shared by exactly two of them (ignoring `skip_slot` facets).
  bool match_ridges(const std::vector<std::array<std::int32_t, kMaxWidth>>& cells,
                    const std::vector<std::size_t>& skip_slot,
                    std::vector<std::array<std::int32_t, kMaxWidth>>& links) const {
    std::vector<RidgeEntry> entries;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      for (std::size_t j = 0; j < width_; ++j) {
        if (j == skip_slot[k]) continue;
        RidgeEntry e{};
        e.key.fill(std::numeric_limits<std::int32_t>::max());
        std::size_t m = 0;
        for (std::size_t i = 0; i < width_; ++i)
          if (i != j) e.key[m++] = cells[k][i];
        std::sort(e.key.begin(), e.key.begin() + static_cast<std::ptrdiff_t>(m));
        e.cell = k;
        e.slot = j;
        entries.push_back(e);
      }
    }
    std::sort(entries.begin(), entries.end(),
              [](const RidgeEntry& a, const RidgeEntry& b) { return a.key < b.key; });
    for (std::size_t i = 0; i < entries.size(); i += 2) {
      if (i + 1 >= entries.size() || entries[i].key != entries[i + 1].key) return false;
      if (i + 2 < entries.size() && entries[i + 2].key == entries[i].key) return false;
      links[entries[i].cell][entries[i].slot] = static_cast<std::int32_t>(entries[i + 1].cell);
      links[entries[i + 1].cell][entries[i + 1].slot] = static_cast<std::int32_t>(entries[i].cell);
    }
    return true;
  }

  void seed_cells(const std::vector<std::uint32_t>& first) {
    interior_.assign(d_, 0.0);
    for (auto v : first)
      for (std::size_t t = 0; t < d_; ++t) interior_[t] += coord(static_cast<std::int32_t>(v))[t];
    for (auto& v : interior_) v /= static_cast<double>(width_);

    std::vector<std::array<std::int32_t, kMaxWidth>> cells(width_ + 1);
    for (std::size_t i = 0; i < width_; ++i) cells[0][i] = static_cast<std::int32_t>(first[i]);
    for (std::size_t j = 0; j < width_; ++j) {
      cells[j + 1] = cells[0];
      cells[j + 1][j] = kInf;
    }
    std::vector<std::array<std::int32_t, kMaxWidth>> links(cells.size());
    std::vector<std::size_t> no_skip(cells.size(), width_);
    if (!match_ridges(cells, no_skip, links)) throw std::logic_error("build_delaunay: bad seed complex");
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const std::size_t c = allocate();
      for (std::size_t i = 0; i < width_; ++i) {
        vert(c, i) = cells[k][i];
        nbr(c, i) = links[k][i];  // ids coincide with k on a fresh structure
      }
      sign_[c] = static_cast<std::int8_t>(reference_sign(&verts_[c * width_]));
      alive_[c] = 1;
    }
    last_ = 0;
  }

  std::uint64_t next_random() {
    walk_rng_ ^= walk_rng_ << 13;
    walk_rng_ ^= walk_rng_ >> 7;
    walk_rng_ ^= walk_rng_ << 17;
    return walk_rng_;
  }

  // Visibility walk to a cell in conflict with p; -1 when the walk ends on
  // an ambiguous predicate.
  std::int32_t locate(std::int32_t p) {
    std::size_t c = alive_[static_cast<std::size_t>(last_)] ? static_cast<std::size_t>(last_) : 0;
    while (!alive_[c]) ++c;
    const std::size_t cap = 4 * alive_.size() + 64;
    for (std::size_t steps = 0; steps < cap; ++steps) {
      const std::size_t slot = inf_slot(c);
      if (slot != width_) {
        const Verdict v = conflict(c, p);
        if (v == Verdict::Yes) return static_cast<std::int32_t>(c);
        if (v == Verdict::Ambiguous) return -1;
        c = static_cast<std::size_t>(nbr(c, slot));
        continue;
      }
      const std::int32_t* vs = &verts_[c * width_];
      const std::size_t start = static_cast<std::size_t>(next_random() % width_);
      bool moved = false;
      for (std::size_t k = 0; k < width_; ++k) {
        const std::size_t i = (start + k) % width_;
        if (orient_replaced(vs, i, coord(p)) == -sign_[c]) {
          c = static_cast<std::size_t>(nbr(c, i));
          moved = true;
          break;
        }
      }
      if (moved) continue;
      const Verdict v = conflict(c, p);
      return v == Verdict::Yes ? static_cast<std::int32_t>(c) : -1;
    }
    for (std::size_t k = 0; k < alive_.size(); ++k) {
      if (alive_[k] && conflict(k, p) == Verdict::Yes) return static_cast<std::int32_t>(k);
    }
    return -1;
  }

  bool insert(std::int32_t p) {
    ++cur_stamp_;
    const std::int32_t seed_cell = locate(p);
    if (seed_cell < 0) return false;

    std::vector<std::int32_t> region{seed_cell};
    region_mark_[static_cast<std::size_t>(seed_cell)] = cur_stamp_;
    std::vector<Boundary> boundary;
    for (std::size_t head = 0; head < region.size(); ++head) {
      const std::size_t c = static_cast<std::size_t>(region[head]);
      for (std::size_t i = 0; i < width_; ++i) {
        const std::int32_t t = nbr(c, i);
        const Verdict v = conflict(static_cast<std::size_t>(t), p);
        if (v == Verdict::Ambiguous) return false;
        if (v == Verdict::Yes) {
          if (region_mark_[static_cast<std::size_t>(t)] != cur_stamp_) {
            region_mark_[static_cast<std::size_t>(t)] = cur_stamp_;
            region.push_back(t);
          }
          continue;
        }
        std::size_t back = width_;
        for (std::size_t j = 0; j < width_; ++j)
          if (nbr(static_cast<std::size_t>(t), j) == static_cast<std::int32_t>(c)) back = j;
        if (back == width_) return false;
        boundary.push_back({static_cast<std::int32_t>(c), i, t, back});
      }
    }

    // Prospective cells; every one must be non-degenerate.
    std::vector<std::array<std::int32_t, kMaxWidth>> cells(boundary.size());
    std::vector<std::int8_t> signs(boundary.size());
    std::vector<std::size_t> p_slot(boundary.size());
    for (std::size_t k = 0; k < boundary.size(); ++k) {
      const auto& b = boundary[k];
      for (std::size_t i = 0; i < width_; ++i) cells[k][i] = vert(static_cast<std::size_t>(b.cell), i);
      cells[k][b.facet] = p;
      p_slot[k] = b.facet;
      const int s = reference_sign(cells[k].data());
      if (s == 0) return false;
      signs[k] = static_cast<std::int8_t>(s);
    }
    std::vector<std::array<std::int32_t, kMaxWidth>> links(cells.size());
    if (!match_ridges(cells, p_slot, links)) return false;

    // Commit: reuse the region's slots first.
    for (auto c : region) {
      alive_[static_cast<std::size_t>(c)] = 0;
      free_.push_back(c);
    }
    std::vector<std::size_t> ids(cells.size());
    for (auto& id : ids) id = allocate();
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const std::size_t c = ids[k];
      for (std::size_t i = 0; i < width_; ++i) {
        vert(c, i) = cells[k][i];
        nbr(c, i) = i == p_slot[k] ? boundary[k].outside : static_cast<std::int32_t>(ids[static_cast<std::size_t>(links[k][i])]);
      }
      sign_[c] = signs[k];
      alive_[c] = 1;
      stamp_[c] = 0;
      region_mark_[c] = 0;
      nbr(static_cast<std::size_t>(boundary[k].outside), boundary[k].back) = static_cast<std::int32_t>(c);
    }
    last_ = static_cast<std::int32_t>(ids.back());
    return true;
  }

  void nudge(std::uint32_t p, int attempt) {
    std::mt19937_64 rng(detail::derive_seed(seed_, (static_cast<std::uint64_t>(p) << 8) | static_cast<std::uint64_t>(attempt)));
    const double eta = scale_ * 1e-11 * std::pow(10.0, attempt - 1);
    std::uniform_real_distribution<double> shift(-eta, eta);
    for (std::size_t t = 0; t < d_; ++t) pts_[static_cast<std::size_t>(p) * d_ + t] += shift(rng);
  }

  std::size_t d_, n_, width_;
  std::vector<double> pts_;
  std::uint64_t seed_;
  std::uint64_t walk_rng_;
  double scale_ = 1.0;
  std::vector<double> interior_;
  std::vector<std::int32_t> verts_, nbrs_, free_;
  std::vector<std::int8_t> sign_;
  std::vector<std::uint8_t> alive_;
  std::vector<std::uint32_t> stamp_, region_mark_;
  std::vector<std::uint8_t> state_;
  std::uint32_t cur_stamp_ = 0;
  std::int32_t last_ = 0;
};

DtGraph complete_graph(std::size_t dim, std::size_t n) {
  DtGraph g;
  g.dim = dim;
  g.adjacency.resize(n);
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = 0; b < n; ++b)
      if (a != b) g.adjacency[a].push_back(b);
  return g;
}

DtGraph path_graph(const Dataset& sites) {
  const std::size_t n = sites.size();
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    const double ca = sites.point(a)[0], cb = sites.point(b)[0];
    return ca < cb || (ca == cb && a < b);
  });
  DtGraph g;
  g.dim = 1;
  g.adjacency.resize(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::uint32_t a = order[i], b = order[i + 1];
    g.adjacency[a].push_back(b);
    g.adjacency[b].push_back(a);
    g.simplices.push_back({std::min(a, b), std::max(a, b)});
  }
  for (auto& nb : g.adjacency) std::sort(nb.begin(), nb.end());
  std::sort(g.simplices.begin(), g.simplices.end());
  return g;
}

}  // namespace

DtGraph build_delaunay(const Dataset& sites, std::uint64_t seed) {
  const std::size_t d = sites.dim();
  if (sites.empty()) throw std::invalid_argument("build_delaunay: no sites");
  if (d > kMaxDelaunayDim)
    throw ConfigError("build_delaunay: dimension " + std::to_string(d) + " exceeds the supported maximum of " +
                      std::to_string(kMaxDelaunayDim));
  if (d == 1) return path_graph(sites);
  if (sites.size() <= d + 1) {
    DtGraph g = complete_graph(d, sites.size());
    if (sites.size() == d + 1) {
      std::vector<std::uint32_t> s(d + 1);
      std::iota(s.begin(), s.end(), 0u);
      if (circumsphere(sites, s)) g.simplices.push_back(std::move(s));
    }
    return g;
  }
  return Triangulator(sites, seed).run();
}

std::optional<Sphere> circumsphere(const Dataset& sites, std::span<const std::uint32_t> simplex) {
  const std::size_t d = sites.dim();
  if (simplex.size() != d + 1) return std::nullopt;
  const Coords p0 = sites.point(simplex[0]);
  std::vector<double> a(d * d), b(d);
  for (std::size_t r = 0; r < d; ++r) {
    const Coords pr = sites.point(simplex[r + 1]);
    double rhs = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double v = pr[c] - p0[c];
      a[r * d + c] = 2.0 * v;
      rhs += v * v;
    }
    b[r] = rhs;
  }
  auto x = detail::solve(std::move(a), std::move(b), d, 1e-14);
  if (!x) return std::nullopt;
  Sphere s;
  s.center.resize(d);
  for (std::size_t c = 0; c < d; ++c) s.center[c] = p0[c] + (*x)[c];
  s.radius = std::sqrt(std::inner_product(x->begin(), x->end(), x->begin(), 0.0));
  if (!std::isfinite(s.radius)) return std::nullopt;
  return s;
}

bool admits_empty_circle(const Dataset& sites, std::uint32_t a, std::uint32_t b) {
  if (sites.dim() != 2) throw std::invalid_argument("admits_empty_circle: planar sites only");
  const Coords pa = sites.point(a), pb = sites.point(b);
  const double mx = 0.5 * (pa[0] + pb[0]), my = 0.5 * (pa[1] + pb[1]);
  // Centers m + t * nrm; site x is strictly inside iff k(x) < 2 t (nrm . (x - m)).
  const double nx = -(pb[1] - pa[1]), ny = pb[0] - pa[0];
  const double ra2 = (pa[0] - mx) * (pa[0] - mx) + (pa[1] - my) * (pa[1] - my);
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  const double tol = 1e-9 * ra2;
  for (std::uint32_t i = 0; i < sites.size(); ++i) {
    if (i == a || i == b) continue;
    const Coords x = sites.point(i);
    const double dx = x[0] - mx, dy = x[1] - my;
    const double kx = dx * dx + dy * dy - ra2;  // > 0 outside the diametral circle
    const double side = 2.0 * (nx * dx + ny * dy);
    if (side == 0.0) {
      if (kx < -tol) return false;
      continue;
    }
    // Not inside: kx >= side * t - tol.
    const double bound = (kx + tol) / side;
    if (side > 0.0)
      hi = std::min(hi, bound);
    else
      lo = std::max(lo, bound);
    if (lo > hi) return false;
  }
  return true;
}

EmptySphereReport verify_empty_sphere(const Dataset& sites, const DtGraph& graph) {
  EmptySphereReport rep;
  using Kind = EmptySphereViolation::Kind;
  const std::size_t n = sites.size();

  std::vector<std::uint32_t> by_x(n);
  std::iota(by_x.begin(), by_x.end(), 0u);
  std::sort(by_x.begin(), by_x.end(),
            [&](std::uint32_t a, std::uint32_t b) { return sites.point(a)[0] < sites.point(b)[0]; });
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = sites.point(by_x[i])[0];

  for (std::size_t s = 0; s < graph.simplices.size(); ++s) {
    const auto& simplex = graph.simplices[s];
    auto sphere = circumsphere(sites, simplex);
    if (!sphere) {
      rep.violations.push_back({Kind::DegenerateSimplex, s, 0, {}});
      continue;
    }
    const double limit = sphere->radius - 1e-9 * sphere->radius;
    auto first = std::lower_bound(xs.begin(), xs.end(), sphere->center[0] - sphere->radius);
    auto last = std::upper_bound(xs.begin(), xs.end(), sphere->center[0] + sphere->radius);
    for (auto it = first; it != last; ++it) {
      const std::uint32_t site = by_x[static_cast<std::size_t>(it - xs.begin())];
      if (std::find(simplex.begin(), simplex.end(), site) != simplex.end()) continue;
      if (distance(sites.point(site), sphere->center) < limit)
        rep.violations.push_back({Kind::SiteInside, s, site, {}});
    }
  }

  const bool complete = n <= sites.dim() + 1;
  std::vector<std::vector<std::uint32_t>> in_simplex(n);
  for (const auto& simplex : graph.simplices)
    for (std::size_t a = 0; a < simplex.size(); ++a)
      for (std::size_t b = 0; b < simplex.size(); ++b)
        if (a != b) in_simplex[simplex[a]].push_back(simplex[b]);
  for (auto& v : in_simplex) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }

  for (std::uint32_t a = 0; a < graph.adjacency.size(); ++a) {
    for (std::uint32_t b : graph.adjacency[a]) {
      const auto& back = graph.adjacency[b];
      if (!std::binary_search(back.begin(), back.end(), a))
        rep.violations.push_back({Kind::AsymmetricEdge, 0, 0, {a, b}});
      if (a > b) continue;
      if (!complete && !std::binary_search(in_simplex[a].begin(), in_simplex[a].end(), b))
        rep.violations.push_back({Kind::EdgeWithoutSimplex, 0, 0, {a, b}});
      if (sites.dim() == 2 && !admits_empty_circle(sites, a, b)) rep.bad_edges.push_back({a, b});
    }
  }
  rep.ok = rep.violations.empty() && rep.bad_edges.empty();
  return rep;
}

}  // namespace hdgknn
