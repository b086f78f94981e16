#include "hdgknn/enclosing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace hdgknn {

std::size_t AmesParams::iterations() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("ames: epsilon must lie in (0, 1)");
  const double raw = 1.0 / (epsilon * epsilon);
  return static_cast<std::size_t>(std::ceil(raw * (1.0 - 1e-12)));
}

Sphere ames(const Dataset& data, std::span<const PointId> ids, double epsilon) {
  if (ids.empty()) throw std::invalid_argument("ames: empty point set");
  const std::size_t iters = AmesParams{epsilon}.iterations();
  const std::size_t d = data.dim();

  const PointId start = *std::min_element(ids.begin(), ids.end());
  const Coords s = data.point(start);
  std::vector<double> center(s.begin(), s.end());

  auto farthest = [&]() {
    PointId best = 0;
    double best_d2 = -1.0;
    for (PointId id : ids) {
      const double d2 = squared_distance(data.point(id), center);
      if (d2 > best_d2 || (d2 == best_d2 && id < best)) {
        best_d2 = d2;
        best = id;
      }
    }
    return best;
  };

  if (ids.size() > 1) {
    for (std::size_t i = 1; i <= iters; ++i) {
      const Coords p = data.point(farthest());
      const double step = 1.0 / static_cast<double>(i);
      for (std::size_t t = 0; t < d; ++t) center[t] += step * (p[t] - center[t]);
    }
  }

  double radius = 0.0;
  for (PointId id : ids) radius = std::max(radius, distance(data.point(id), center));
  return Sphere{std::move(center), radius};
}

Sphere ames(const Dataset& data, double epsilon) {
  std::vector<PointId> ids(data.size());
  std::iota(ids.begin(), ids.end(), 0);
  return ames(data, ids, epsilon);
}

}  // namespace hdgknn
