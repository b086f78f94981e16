#include <sstream>

#include "doctest.h"
#include "hdgknn/bench.hpp"
#include "hdgknn/hdg.hpp"
#include "oracles.hpp"

using namespace hdgknn;

namespace {

bool check_failed(const ValidationReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return !c.passed;
  FAIL("no check named " << name);
  return false;
}

std::string to_bytes(const Hdg& index) {
  std::ostringstream out;
  save_index(index, out);
  return out.str();
}

}  // namespace

TEST_CASE("single point index") {
  const Hdg idx = build_index(Dataset::from_rows({{0.5, 0.25}}));
  REQUIRE(idx.nodes.size() == 1);
  CHECK(idx.root().sphere.radius == 0.0);
  CHECK(idx.root().neighbors.empty());
  CHECK(validate_index(idx).ok());
}

TEST_CASE("eight points in the plane") {
  const Hdg idx = build_index(oracle::uniform(8, 2, 4), {0.1, 9});
  REQUIRE(idx.layers.size() == 4);
  CHECK(idx.layers[0].size() == 1);
  CHECK(idx.layers[1].size() == 2);
  CHECK(idx.layers[2].size() == 4);
  CHECK(idx.layers[3].size() == 8);
  const Dataset centers = layer_centers(idx, 2);
  const DtGraph g = layer_graph(idx, 2);
  CHECK(verify_empty_sphere(centers, g).ok);
  CHECK(validate_index(idx).ok());
}

TEST_CASE("poisson indexes validate") {
  for (std::size_t n : {1024, 777, 5, 2, 3}) {
    const Hdg idx = build_index(gen_poisson(n, 2, 1.0, n), {0.1, 1});
    const auto rep = validate_index(idx);
    for (const auto& c : rep.checks) CHECK_MESSAGE(c.passed, n << " " << c.name << ": " << c.detail);
  }
  for (std::size_t d : {1, 3, 4}) {
    const Hdg idx = build_index(gen_poisson(300, d, 1.0, d), {0.1, 2});
    CHECK(validate_index(idx).ok());
  }
}

TEST_CASE("build is deterministic per seed") {
  const Dataset data = gen_poisson(500, 2, 1.0, 3);
  const Hdg a = build_index(data, {0.1, 5}), b = build_index(data, {0.1, 5});
  CHECK(a == b);
  CHECK(to_bytes(a) == to_bytes(b));
  CHECK_FALSE(build_index(data, {0.1, 6}).data == a.data);
}

TEST_CASE("dimension out of range is a config error") {
  CHECK_THROWS_AS(build_index(oracle::uniform(20, 7, 1)), ConfigError);
}

TEST_CASE("injected faults are detected") {
  const Hdg good = build_index(gen_poisson(256, 2, 1.0, 8), {0.1, 1});
  REQUIRE(validate_index(good).ok());

  Hdg shrunk = good;
  shrunk.nodes[3].sphere.radius = 0.0;
  CHECK(check_failed(validate_index(shrunk), "enclosure"));

  Hdg asym = good;
  const NodeId a = asym.layers[4][0];
  NodeId b = asym.layers[4][1];
  for (NodeId cand : asym.layers[4])
    if (cand != a && !std::binary_search(asym.nodes[a].neighbors.begin(), asym.nodes[a].neighbors.end(), cand)) {
      b = cand;
      break;
    }
  asym.nodes[a].neighbors.push_back(b);
  std::sort(asym.nodes[a].neighbors.begin(), asym.nodes[a].neighbors.end());
  CHECK(check_failed(validate_index(asym), "adjacency_symmetry"));

  Hdg lost = good;
  lost.nodes[5].point_ids.pop_back();
  CHECK(check_failed(validate_index(lost), "partition"));
}

TEST_CASE("index round trip") {
  const Hdg idx = build_index(gen_poisson(300, 3, 2.0, 1), {0.2, 17});
  std::stringstream ss;
  save_index(idx, ss);
  const Hdg back = load_index(ss);
  CHECK(back == idx);
  CHECK(validate_index(back).ok());
  CHECK(to_bytes(back) == to_bytes(idx));
}

TEST_CASE("corrupt index files are rejected") {
  const Hdg idx = build_index(gen_poisson(64, 2, 1.0, 1));
  const std::string bytes = to_bytes(idx);

  for (std::size_t cut : {std::size_t{0}, std::size_t{3}, std::size_t{20}, bytes.size() / 2, bytes.size() - 1}) {
    std::istringstream in(bytes.substr(0, cut));
    CHECK_THROWS_AS(load_index(in), FormatError);
  }

  std::string magic = bytes;
  magic[0] = 'X';
  std::istringstream bad_magic(magic);
  CHECK_THROWS_AS(load_index(bad_magic), FormatError);

  std::string version = bytes;
  version[4] = 9;
  std::istringstream bad_version(version);
  CHECK_THROWS_AS(load_index(bad_version), VersionError);

  std::istringstream trailing(bytes + "x");
  CHECK_THROWS_AS(load_index(trailing), FormatError);

  std::istringstream wrong_dim(bytes);
  CHECK_THROWS_AS(load_index(wrong_dim, 3), FormatError);
}
