#include "doctest.h"
#include "hdgknn/enclosing.hpp"
#include "oracles.hpp"

using namespace hdgknn;

TEST_CASE("iteration count") {
  CHECK(AmesParams{0.1}.iterations() == 100);
  CHECK(AmesParams{0.5}.iterations() == 4);
  CHECK(AmesParams{0.3}.iterations() == 12);
  CHECK_THROWS(AmesParams{0.0}.iterations());
  CHECK_THROWS(AmesParams{1.0}.iterations());
}

TEST_CASE("ames examples") {
  const Sphere one = ames(Dataset::from_rows({{4, 2}}), 0.1);
  CHECK(one.radius == 0.0);
  CHECK(one.center == std::vector<double>{4, 2});

  const Sphere two = ames(Dataset::from_rows({{0, 0}, {2, 0}}), 0.1);
  CHECK(two.radius >= 1.0);
  CHECK(two.radius <= 1.1);
}

TEST_CASE("ames is within 1 + eps of the exact sphere and encloses exactly") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Dataset data = oracle::uniform(100, 3, seed);
    const Sphere approx = ames(data, 0.1);
    const Sphere exact = exact_mes(data);
    CHECK(approx.radius <= 1.1 * exact.radius);
    for (PointId i = 0; i < data.size(); ++i) CHECK(distance(data.point(i), approx.center) <= approx.radius);
  }
}

TEST_CASE("ames over a subset only sees that subset") {
  const Dataset data = Dataset::from_rows({{0, 0}, {100, 100}, {1, 0}, {0, 1}});
  const std::vector<PointId> ids{0, 2, 3};
  const Sphere s = ames(data, ids, 0.1);
  CHECK(s.radius < 1.0);
  CHECK_FALSE(s.contains(data.point(1)));
}

TEST_CASE("ames is deterministic") {
  const Dataset data = oracle::uniform(64, 4, 3);
  CHECK(ames(data, 0.1) == ames(data, 0.1));
}
