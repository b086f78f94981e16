#include "hdgknn/hdg.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "hdgknn/detail/seeding.hpp"
#include "hdgknn/enclosing.hpp"

namespace hdgknn {

static_assert(std::endian::native == std::endian::little, "index I/O assumes a little-endian host");

Hdg build_index(const Dataset& points, const BuildParams& params) {
  if (points.empty()) throw std::invalid_argument("build_index: empty dataset");
  if (points.dim() < 1 || points.dim() > kMaxDelaunayDim)
    throw ConfigError("build_index: dimension " + std::to_string(points.dim()) +
                      " is outside [1, 6]; project the data first or use the exact backend on its own");
  (void)AmesParams{params.epsilon}.iterations();  // validates epsilon

  Hdg index;
  index.params = params;
  index.data = points.jittered(params.seed);

  // Step 1: median split tree, flattened.
  const SplitTree bmst = balance_to_bmst(build_mst(index.data));

  // Step 2: spheres.
  index.nodes.resize(bmst.nodes.size());
  for (const TreeNode& t : bmst.nodes) {
    HdgNode& node = index.nodes[t.id];
    node.id = t.id;
    node.depth = t.depth;
    node.point_ids = t.point_ids;
    node.children = t.children;
    node.sphere = ames(index.data, node.point_ids, params.epsilon);
  }
  index.layers = bmst.layers();

  // Step 3: one triangulation per layer.
  index.layer_simplices.resize(index.layers.size());
  for (std::size_t l = 0; l < index.layers.size(); ++l) {
    const auto& layer = index.layers[l];
    const DtGraph g = build_delaunay(layer_centers(index, l), detail::derive_seed(params.seed, 0x1000 + l));
    for (std::size_t i = 0; i < layer.size(); ++i) {
      auto& nb = index.nodes[layer[i]].neighbors;
      for (auto j : g.adjacency[i]) nb.push_back(layer[j]);
      std::sort(nb.begin(), nb.end());
    }
    for (const auto& s : g.simplices) {
      std::vector<NodeId> ids;
      for (auto j : s) ids.push_back(layer[j]);
      std::sort(ids.begin(), ids.end());
      index.layer_simplices[l].push_back(std::move(ids));
    }
  }
  return index;
}

Dataset layer_centers(const Hdg& index, std::size_t layer) {
  std::vector<double> flat;
  flat.reserve(index.layers.at(layer).size() * index.dim());
  for (NodeId id : index.layers[layer]) {
    const auto& c = index.nodes[id].sphere.center;
    flat.insert(flat.end(), c.begin(), c.end());
  }
  return Dataset(index.dim(), std::move(flat));
}

DtGraph layer_graph(const Hdg& index, std::size_t layer) {
  const auto& ids = index.layers.at(layer);
  std::vector<std::uint32_t> local(index.nodes.size(), UINT32_MAX);
  for (std::size_t i = 0; i < ids.size(); ++i) local[ids[i]] = static_cast<std::uint32_t>(i);
  DtGraph g;
  g.dim = index.dim();
  g.adjacency.resize(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (NodeId nb : index.nodes[ids[i]].neighbors) {
      g.adjacency[i].push_back(nb < local.size() ? local[nb] : UINT32_MAX);
    }
    std::sort(g.adjacency[i].begin(), g.adjacency[i].end());
  }
  for (const auto& s : index.layer_simplices.at(layer)) {
    std::vector<std::uint32_t> t;
    for (NodeId id : s) t.push_back(id < local.size() ? local[id] : UINT32_MAX);
    std::sort(t.begin(), t.end());
    g.simplices.push_back(std::move(t));
  }
  return g;
}

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.passed; });
}

namespace {

class CheckBuilder {
 public:
  explicit CheckBuilder(std::string name) { check_.name = std::move(name); }
  void fail(const std::string& why) {
    if (check_.passed) check_.detail = why;  // keep the first failure
    check_.passed = false;
  }
  ValidationCheck done() { return std::move(check_); }

 private:
  ValidationCheck check_;
};

}  // namespace

ValidationReport validate_index(const Hdg& index) {
  ValidationReport rep;
  const std::size_t n = index.size();
  const std::size_t nn = index.nodes.size();

  {
    CheckBuilder c("root");
    if (nn == 0 || index.layers.empty() || index.layers[0].size() != 1 || index.layers[0][0] != 0)
      c.fail("layer 0 is not the single root node");
    else if (index.root().point_ids.size() != n)
      c.fail("root holds " + std::to_string(index.root().point_ids.size()) + " of " + std::to_string(n) + " points");
    rep.checks.push_back(c.done());
  }
  if (nn == 0) return rep;

  {
    CheckBuilder c("layers");
    const std::uint32_t flat = flattening_layer(n);
    const std::size_t expected_layers = n == 1 ? 1 : flat + 2;
    if (index.layers.size() != expected_layers)
      c.fail("expected " + std::to_string(expected_layers) + " layers, found " + std::to_string(index.layers.size()));
    for (std::size_t l = 0; l < index.layers.size(); ++l) {
      for (NodeId id : index.layers[l]) {
        if (id >= nn || index.nodes[id].depth != l) c.fail("node " + std::to_string(id) + " filed under layer " + std::to_string(l));
        else if (index.nodes[id].id != id) c.fail("node " + std::to_string(id) + " carries id " + std::to_string(index.nodes[id].id));
      }
      if (l < flat && index.layers[l].size() != (std::size_t{1} << l))
        c.fail("layer " + std::to_string(l) + " has " + std::to_string(index.layers[l].size()) + " nodes");
    }
    const std::size_t leaf_depth = index.layers.size() - 1;
    for (const auto& node : index.nodes) {
      if (node.children.empty() && node.depth != leaf_depth)
        c.fail("leaf " + std::to_string(node.id) + " at depth " + std::to_string(node.depth));
    }
    rep.checks.push_back(c.done());
  }

  {
    CheckBuilder c("partition");
    for (const auto& node : index.nodes) {
      if (node.children.empty()) {
        if (node.point_ids.size() != 1 && n > 1) c.fail("leaf " + std::to_string(node.id) + " is not a singleton");
        continue;
      }
      std::vector<PointId> merged;
      for (NodeId ch : node.children) {
        if (ch >= nn || index.nodes[ch].depth != node.depth + 1) {
          c.fail("node " + std::to_string(node.id) + " has a malformed child");
          continue;
        }
        merged.insert(merged.end(), index.nodes[ch].point_ids.begin(), index.nodes[ch].point_ids.end());
      }
      std::vector<PointId> own = node.point_ids;
      std::sort(own.begin(), own.end());
      std::sort(merged.begin(), merged.end());
      if (own != merged) c.fail("children of node " + std::to_string(node.id) + " do not partition it");
    }
    for (std::size_t l = 0; l < index.layers.size(); ++l) {
      std::size_t total = 0;
      for (NodeId id : index.layers[l]) total += id < nn ? index.nodes[id].point_ids.size() : 0;
      if (total != n) c.fail("layer " + std::to_string(l) + " covers " + std::to_string(total) + " points");
    }
    rep.checks.push_back(c.done());
  }

  {
    CheckBuilder c("enclosure");
    for (const auto& node : index.nodes) {
      if (node.sphere.center.size() != index.dim() || !(node.sphere.radius >= 0.0)) {
        c.fail("node " + std::to_string(node.id) + " has a malformed sphere");
        continue;
      }
      for (PointId p : node.point_ids) {
        if (p >= n || !node.sphere.contains(index.data.point(p))) {
          c.fail("point " + std::to_string(p) + " escapes the sphere of node " + std::to_string(node.id));
          break;
        }
      }
    }
    rep.checks.push_back(c.done());
  }

  {
    CheckBuilder c("adjacency_symmetry");
    for (const auto& node : index.nodes) {
      for (NodeId nb : node.neighbors) {
        if (nb >= nn || nb == node.id) {
          c.fail("node " + std::to_string(node.id) + " lists an invalid neighbour");
          continue;
        }
        const auto& other = index.nodes[nb];
        if (other.depth != node.depth) c.fail("edge " + std::to_string(node.id) + "-" + std::to_string(nb) + " crosses layers");
        if (!std::binary_search(other.neighbors.begin(), other.neighbors.end(), node.id))
          c.fail("edge " + std::to_string(node.id) + "->" + std::to_string(nb) + " has no reverse");
      }
    }
    rep.checks.push_back(c.done());
  }

  {
    CheckBuilder c("delaunay");
    if (index.layer_simplices.size() != index.layers.size()) {
      c.fail("simplex table does not match the layer count");
    } else {
      for (std::size_t l = 0; l < index.layers.size(); ++l) {
        const Dataset centers = layer_centers(index, l);
        const DtGraph g = layer_graph(index, l);
        const EmptySphereReport r = verify_empty_sphere(centers, g);
        if (!r.ok) {
          c.fail("layer " + std::to_string(l) + ": " + std::to_string(r.violations.size()) + " violations, " +
                 std::to_string(r.bad_edges.size()) + " edges without an empty circle");
          continue;
        }
        // Every simplex edge must be in the adjacency.
        const std::size_t m = index.layers[l].size();
        const bool complete = m <= index.dim() + 1 || index.dim() == 1;
        if (complete && index.dim() > 1) {
          for (const auto& nb : g.adjacency)
            if (nb.size() != m - 1) c.fail("layer " + std::to_string(l) + " should be a complete graph");
        }
        for (const auto& s : g.simplices)
          for (auto a : s)
            for (auto b : s)
              if (a != b && !std::binary_search(g.adjacency[a].begin(), g.adjacency[a].end(), b))
                c.fail("layer " + std::to_string(l) + ": simplex edge missing from the adjacency");
      }
    }
    rep.checks.push_back(c.done());
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Binary format, little-endian:
//   "HDG1" u32 version u32 d u64 n f64 epsilon u64 seed u64 node_count
//   n*d f64 points
//   per node: u32 depth, u64 m, m*u32 point ids, d*f64 center, f64 radius,
//             u32 c, c*u32 children, u32 k, k*u32 neighbours
//   u32 layer_count, per layer: u64 s, s*(d+1)*u32 simplex node ids
//   "END1"

namespace {

static_assert(std::endian::native == std::endian::little, "index files are little-endian");

constexpr char kMagic[4] = {'H', 'D', 'G', '1'};
constexpr char kTrailer[4] = {'E', 'N', 'D', '1'};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  template <typename T>
  void put(T v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void raw(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::vector<char> bytes) : bytes_(std::move(bytes)) {}
  template <typename T>
  T get(const char* what) {
    need(sizeof(T), what);
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  // Guards counts read from the file before allocating.
  std::size_t count(std::uint64_t c, std::size_t elem_size, const char* what) {
    if (elem_size != 0 && c > (bytes_.size() - pos_) / elem_size)
      throw FormatError(std::string("implausible ") + what + " count " + std::to_string(c), pos_);
    return static_cast<std::size_t>(c);
  }
  void expect(const char (&tag)[4], const char* what) {
    need(4, what);
    if (std::memcmp(bytes_.data() + pos_, tag, 4) != 0) throw FormatError(std::string("bad ") + what, pos_);
    pos_ += 4;
  }
  std::size_t offset() const { return pos_; }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) throw FormatError(std::string("truncated index while reading ") + what, pos_);
  }
  std::vector<char> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_index(const Hdg& index, std::ostream& out) {
  Writer w(out);
  const std::size_t d = index.dim();
  w.raw(kMagic, 4);
  w.put<std::uint32_t>(kIndexFormatVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(d));
  w.put<std::uint64_t>(index.size());
  w.put<double>(index.params.epsilon);
  w.put<std::uint64_t>(index.params.seed);
  w.put<std::uint64_t>(index.nodes.size());
  for (double v : index.data.coords()) w.put<double>(v);
  for (const auto& node : index.nodes) {
    w.put<std::uint32_t>(node.depth);
    w.put<std::uint64_t>(node.point_ids.size());
    for (PointId p : node.point_ids) w.put<std::uint32_t>(p);
    for (double v : node.sphere.center) w.put<double>(v);
    w.put<double>(node.sphere.radius);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(node.children.size()));
    for (NodeId c : node.children) w.put<std::uint32_t>(c);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(node.neighbors.size()));
    for (NodeId c : node.neighbors) w.put<std::uint32_t>(c);
  }
  w.put<std::uint32_t>(static_cast<std::uint32_t>(index.layer_simplices.size()));
  for (const auto& layer : index.layer_simplices) {
    w.put<std::uint64_t>(layer.size());
    for (const auto& s : layer)
      for (NodeId id : s) w.put<std::uint32_t>(id);
  }
  w.raw(kTrailer, 4);
  if (!out) throw std::runtime_error("save_index: write failed");
}

Hdg load_index(std::istream& in, std::optional<std::size_t> expected_dim) {
  std::vector<char> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  Reader r(std::move(bytes));
  r.expect(kMagic, "magic");
  const std::size_t version_at = r.offset();
  const auto version = r.get<std::uint32_t>("version");
  if (version != kIndexFormatVersion) throw VersionError(version, version_at);
  const std::size_t dim_at = r.offset();
  const auto d = r.get<std::uint32_t>("dimension");
  if (d < 1 || d > kMaxDelaunayDim) throw FormatError("dimension " + std::to_string(d) + " out of range", dim_at);
  if (expected_dim && *expected_dim != d)
    throw FormatError("index dimension " + std::to_string(d) + " does not match the expected " +
                          std::to_string(*expected_dim),
                      dim_at);
  const auto n = r.get<std::uint64_t>("point count");
  Hdg index;
  index.params.epsilon = r.get<double>("epsilon");
  index.params.seed = r.get<std::uint64_t>("seed");
  const std::size_t node_count = r.count(r.get<std::uint64_t>("node count"), 4, "node");

  const std::size_t npts = r.count(n, 8 * d, "point");
  if (npts == 0) throw FormatError("index holds no points", r.offset());
  std::vector<double> coords(npts * d);
  for (auto& v : coords) v = r.get<double>("points");
  index.data = Dataset(d, std::move(coords), index.params.seed);

  auto id_in = [&](std::uint32_t v, std::size_t bound, const char* what) {
    if (v >= bound) throw FormatError(std::string(what) + " id " + std::to_string(v) + " out of range", r.offset());
    return v;
  };

  index.nodes.resize(node_count);
  for (std::size_t i = 0; i < node_count; ++i) {
    HdgNode& node = index.nodes[i];
    node.id = static_cast<NodeId>(i);
    node.depth = r.get<std::uint32_t>("node depth");
    node.point_ids.resize(r.count(r.get<std::uint64_t>("node size"), 4, "node point"));
    for (auto& p : node.point_ids) p = id_in(r.get<std::uint32_t>("node points"), npts, "point");
    node.sphere.center.resize(d);
    for (auto& v : node.sphere.center) v = r.get<double>("sphere center");
    node.sphere.radius = r.get<double>("sphere radius");
    node.children.resize(r.count(r.get<std::uint32_t>("child count"), 4, "child"));
    for (auto& c : node.children) c = id_in(r.get<std::uint32_t>("children"), node_count, "child");
    node.neighbors.resize(r.count(r.get<std::uint32_t>("neighbour count"), 4, "neighbour"));
    for (auto& c : node.neighbors) c = id_in(r.get<std::uint32_t>("neighbours"), node_count, "neighbour");
  }
  std::size_t height = 0;
  for (const auto& node : index.nodes) height = std::max<std::size_t>(height, node.depth);
  if (node_count > 0) {
    if (height >= node_count) throw FormatError("node depth out of range", r.offset());
    index.layers.resize(height + 1);
    for (const auto& node : index.nodes) index.layers[node.depth].push_back(node.id);
  }

  const std::size_t layer_count = r.count(r.get<std::uint32_t>("layer count"), 8, "layer");
  if (layer_count != index.layers.size())
    throw FormatError("layer count disagrees with node depths", r.offset());
  index.layer_simplices.resize(layer_count);
  for (auto& layer : index.layer_simplices) {
    layer.resize(r.count(r.get<std::uint64_t>("simplex count"), 4 * (d + 1), "simplex"));
    for (auto& s : layer) {
      s.resize(d + 1);
      for (auto& id : s) id = id_in(r.get<std::uint32_t>("simplex"), node_count, "simplex node");
    }
  }
  r.expect(kTrailer, "trailer");
  if (!r.at_end()) throw FormatError("trailing bytes after the index", r.offset());
  return index;
}

void save_index_file(const Hdg& index, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write index " + path);
  save_index(index, out);
}

Hdg load_index_file(const std::string& path, std::optional<std::size_t> expected_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open index " + path);
  return load_index(in, expected_dim);
}

}  // namespace hdgknn
