#include <random>
#include <stdexcept>

#include "hdgknn/bench.hpp"

namespace hdgknn {

Dataset gen_poisson(std::size_t n, std::size_t d, double side, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_poisson: n must be >= 1");
  if (d < 1 || d > kMaxDelaunayDim) throw std::invalid_argument("gen_poisson: d must lie in [1, 6]");
  if (!(side > 0.0)) throw std::invalid_argument("gen_poisson: side length must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, side);
  std::vector<double> coords(n * d);
  for (auto& v : coords) v = u(rng);
  return Dataset(d, std::move(coords));
}

}  // namespace hdgknn
