#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <sstream>

#include "hdgknn/bench.hpp"
#include "hdgknn/hdg.hpp"
#include "hdgknn/query.hpp"

namespace py = pybind11;
using namespace hdgknn;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Dataset to_dataset(const Array& points) {
  if (points.ndim() != 2) throw std::invalid_argument("points must be a 2-d array of shape (n, d)");
  const auto n = static_cast<std::size_t>(points.shape(0)), d = static_cast<std::size_t>(points.shape(1));
  std::vector<double> coords(points.data(), points.data() + n * d);
  return Dataset(d, std::move(coords));
}

Array to_array(const Dataset& data) {
  Array out({data.size(), data.dim()});
  std::copy(data.coords().begin(), data.coords().end(), out.mutable_data());
  return out;
}

std::vector<double> to_point(const Array& q) {
  if (q.ndim() != 1) throw std::invalid_argument("query must be a 1-d array");
  return {q.data(), q.data() + q.shape(0)};
}

// Owns the index plus the most recent backend so repeated LSH queries reuse
// their tables.
class PyIndex {
 public:
  explicit PyIndex(Hdg index) : index_(std::move(index)) {}

  const Hdg& get() const { return index_; }

  const CrKnnBackend& backend(const std::string& name, const QueryParams& p, std::uint64_t seed) {
    const BackendKind kind = parse_backend(name);
    if (!backend_ || kind != kind_ || p.k != k_ || p.c != c_ || seed != seed_) {
      backend_ = make_backend(index_, kind, p, seed);
      kind_ = kind;
      k_ = p.k;
      c_ = p.c;
      seed_ = seed;
    }
    return *backend_;
  }

 private:
  Hdg index_;
  std::unique_ptr<CrKnnBackend> backend_;
  BackendKind kind_ = BackendKind::Exact;
  std::size_t k_ = 0;
  double c_ = 0.0;
  std::uint64_t seed_ = 0;
};

py::dict outcome_dict(const QueryOutcome& out) {
  py::dict d;
  d["ids"] = out.ids;
  d["loop_index"] = out.loop_index;
  d["path"] = std::string(to_string(out.path));
  d["descent_nodes"] = out.stats.descent_nodes;
  d["navigation_nodes"] = out.stats.navigation_nodes;
  d["backend_calls"] = out.stats.backend_calls;
  d["candidates_scanned"] = out.stats.candidates_scanned;
  d["fallback"] = out.stats.fallback;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Approximate k-nearest-neighbour search over a hierarchical Delaunay graph";

  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("gen_poisson", [](std::size_t n, std::size_t d, double side, std::uint64_t seed) {
        return to_array(gen_poisson(n, d, side, seed));
      },
      py::arg("n"), py::arg("d"), py::arg("side") = 1.0, py::arg("seed") = 0);

  m.def("exact_knn", [](const Array& points, const Array& q, std::size_t k) {
        const KnnResult r = exact_knn(to_dataset(points), to_point(q), k);
        return py::make_tuple(r.ids, r.t_k);
      },
      py::arg("points"), py::arg("q"), py::arg("k"));

  py::class_<PyIndex>(m, "Index")
      .def(py::init([](const Array& points, double epsilon, std::uint64_t seed) {
             py::gil_scoped_release release;
             return PyIndex(build_index(to_dataset(points), {epsilon, seed}));
           }),
           py::arg("points"), py::arg("epsilon") = 0.1, py::arg("seed") = 0)
      .def_static("load", [](const std::string& path) { return PyIndex(load_index_file(path)); }, py::arg("path"))
      .def("save", [](const PyIndex& self, const std::string& path) { save_index_file(self.get(), path); },
           py::arg("path"))
      .def("to_bytes", [](const PyIndex& self) {
        std::ostringstream out;
        save_index(self.get(), out);
        return py::bytes(out.str());
      })
      .def_property_readonly("size", [](const PyIndex& self) { return self.get().size(); })
      .def_property_readonly("dim", [](const PyIndex& self) { return self.get().dim(); })
      .def_property_readonly("epsilon", [](const PyIndex& self) { return self.get().params.epsilon; })
      .def_property_readonly("seed", [](const PyIndex& self) { return self.get().params.seed; })
      .def_property_readonly("points", [](const PyIndex& self) { return to_array(self.get().data); })
      .def_property_readonly("layer_sizes",
                             [](const PyIndex& self) {
                               std::vector<std::size_t> sizes;
                               for (const auto& l : self.get().layers) sizes.push_back(l.size());
                               return sizes;
                             })
      .def("validate",
           [](const PyIndex& self) {
             py::list out;
             for (const auto& c : validate_index(self.get()).checks) out.append(py::make_tuple(c.name, c.passed, c.detail));
             return out;
           })
      .def("query",
           [](PyIndex& self, const Array& q, std::size_t k, double c, double delta, const std::string& backend,
              std::optional<std::uint64_t> seed) {
             const QueryParams params{k, c, delta};
             const auto point = to_point(q);
             const CrKnnBackend& b = self.backend(backend, params, seed.value_or(self.get().params.seed));
             QueryOutcome out;
             {
               py::gil_scoped_release release;
               out = query(self.get(), point, params, b);
             }
             return outcome_dict(out);
           },
           py::arg("q"), py::arg("k") = 1, py::arg("c") = 2.0, py::arg("delta") = 0.9, py::arg("backend") = "exact",
           py::arg("seed") = py::none())
      .def("bench",
           [](const PyIndex& self, std::size_t queries, std::size_t k, double c, double delta,
              const std::string& backend, std::optional<std::uint64_t> seed) {
             BenchConfig cfg;
             cfg.queries = queries;
             cfg.params = {k, c, delta};
             cfg.backend = parse_backend(backend);
             cfg.seed = seed.value_or(self.get().params.seed);
             BenchReport rep;
             {
               py::gil_scoped_release release;
               rep = run_bench(self.get(), cfg);
             }
             std::ostringstream out;
             write_report(out, rep);
             return out.str();
           },
           py::arg("queries"), py::arg("k") = 10, py::arg("c") = 2.0, py::arg("delta") = 0.9,
           py::arg("backend") = "exact", py::arg("seed") = py::none(),
           "Runs random queries and returns the line-delimited JSON report.");
}
