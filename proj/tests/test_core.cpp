#include <cmath>
#include <sstream>

#include "doctest.h"
#include "hdgknn/core.hpp"
#include "oracles.hpp"

using namespace hdgknn;

namespace {

Dataset line_points(std::size_t n) {
  std::vector<double> c;
  for (std::size_t i = 0; i < n; ++i) {
    c.push_back(static_cast<double>(i));
    c.push_back(0.0);
  }
  return Dataset(2, c);
}

}  // namespace

TEST_CASE("distance") {
  const std::vector<double> o{0, 0}, p{3, 4}, a{1, 1, 1}, b{2, 2, 2};
  CHECK(distance(o, o) == 0.0);
  CHECK(distance(o, p) == 5.0);
  CHECK(distance(a, b) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
  CHECK(distance(p, o) == distance(o, p));
  CHECK_THROWS_AS(distance(o, a), std::invalid_argument);
}

TEST_CASE("exact_knn on a line") {
  const Dataset data = line_points(10);
  const std::vector<double> q{0, 0};
  const KnnResult r = exact_knn(data, q, 3);
  CHECK(r.ids == std::vector<PointId>{0, 1, 2});
  CHECK(r.t_k == 2.0);

  const KnnResult all = exact_knn(data, q, 10);
  CHECK(all.ids.size() == 10);
  CHECK(all.t_k == 9.0);
  CHECK_THROWS_AS(exact_knn(data, q, 11), std::invalid_argument);
  CHECK_THROWS_AS(exact_knn(data, q, 0), std::invalid_argument);
}

TEST_CASE("exact_knn breaks ties by id") {
  const Dataset data = Dataset::from_rows({{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {5, 5}});
  const std::vector<double> q{0, 0};
  CHECK(exact_knn(data, q, 2).ids == std::vector<PointId>{0, 1});
}

TEST_CASE("exact_knn matches a full sort") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Dataset data = oracle::uniform(50, 3, seed);
    const Dataset qs = oracle::uniform(1, 3, seed + 1000);
    const auto want = oracle::full_sort_knn(data, qs.point(0), 5);
    const auto got = exact_knn(data, qs.point(0), 5);
    CHECK(got.ids == want.ids);
    CHECK(got.t_k == want.t_k);
  }
}

TEST_CASE("exact_mes examples") {
  const Sphere one = exact_mes(Dataset::from_rows({{0.3, 0.7}}));
  CHECK(one.radius == 0.0);
  CHECK(one.center == std::vector<double>{0.3, 0.7});

  const Sphere two = exact_mes(Dataset::from_rows({{0, 0}, {2, 0}}));
  CHECK(two.center[0] == doctest::Approx(1.0));
  CHECK(two.center[1] == doctest::Approx(0.0));
  CHECK(two.radius == doctest::Approx(1.0));

  const Dataset square = Dataset::from_rows({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  const auto brute = oracle::brute_mes(square);
  CHECK(brute.second == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-12));
  CHECK(exact_mes(square).radius == doctest::Approx(brute.second).epsilon(1e-12));

  CHECK_THROWS_AS(exact_mes(Dataset()), std::invalid_argument);
}

TEST_CASE("exact_mes matches support-set enumeration") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const std::size_t d = 2 + seed % 3;
    const Dataset data = oracle::uniform(3 + seed % 8, d, seed);
    const auto brute = oracle::brute_mes(data);
    const Sphere s = exact_mes(data);
    CHECK(s.radius == doctest::Approx(brute.second).epsilon(1e-9));
    for (PointId i = 0; i < data.size(); ++i) CHECK(distance(data.point(i), s.center) <= s.radius);
  }
}

TEST_CASE("exact_crknn examples") {
  const Dataset data = line_points(10);
  const std::vector<double> q{0, 0};
  const auto two = exact_crknn(data, q, 2, 2.0, 1.5);
  REQUIRE(two);
  CHECK(two->size() == 2);
  for (PointId id : *two) CHECK(id <= 3);
  CHECK_FALSE(exact_crknn(data, q, 5, 2.0, 0.5));
}

TEST_CASE("exact_crknn obeys the ball-count case analysis") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Dataset data = oracle::uniform(100, 2, seed);
    const std::vector<double> q{u(rng), u(rng)};
    const std::size_t k = 1 + seed % 10;
    const double c = 1.1 + u(rng) * 2.0, r = 0.02 + u(rng) * 0.3;
    const std::size_t inner = oracle::ball_count(data, q, r);
    const std::size_t outer = oracle::ball_count(data, q, c * r);
    const auto got = exact_crknn(data, q, k, c, r);
    if (inner >= k) REQUIRE(got);
    if (outer < k) CHECK_FALSE(got);
    if (got) {
      CHECK(got->size() == k);
      std::set<PointId> distinct(got->begin(), got->end());
      CHECK(distinct.size() == k);
      for (PointId id : *got) CHECK(oracle::dist(data.point(id), q) <= c * r);
    }
  }
}

TEST_CASE("jitter makes coordinates distinct and is seeded") {
  const Dataset grid = Dataset::from_rows({{0, 0}, {0, 1}, {1, 0}, {1, 1}, {0.5, 0.5}});
  CHECK_FALSE(grid.has_distinct_coordinates());
  const Dataset a = grid.jittered(11), b = grid.jittered(11), c = grid.jittered(12);
  CHECK(a.has_distinct_coordinates());
  CHECK(a == b);
  CHECK_FALSE(a == c);
  CHECK(a.jitter_seed() == std::optional<std::uint64_t>(11));
  const double eta = 1e-9 * grid.bbox_diameter();
  for (std::size_t i = 0; i < grid.coords().size(); ++i)
    CHECK(std::abs(a.coords()[i] - grid.coords()[i]) <= eta);
}

TEST_CASE("dataset text round trip") {
  const Dataset data = oracle::uniform(17, 3, 5);
  std::stringstream ss;
  write_dataset_text(ss, data);
  CHECK(read_dataset_text(ss) == data);

  std::istringstream bad("2 3\n1 2\n3 x\n");
  CHECK_THROWS_AS(read_dataset_text(bad), FormatError);
  std::istringstream short_file("2 3\n1 2\n3 4\n");
  CHECK_THROWS_AS(read_dataset_text(short_file), FormatError);
  std::istringstream inf("1 1\ninf\n");
  CHECK_THROWS_AS(read_dataset_text(inf), FormatError);
}
