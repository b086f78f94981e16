#pragma once

#include <cstddef>
#include <span>

#include "hdgknn/core.hpp"

namespace hdgknn {

struct AmesParams {
  double epsilon = 0.1;

  /// ceil(1 / epsilon^2), guarded against rounding just above an integer.
  std::size_t iterations() const;
};

/// (1+epsilon)-approximate minimum enclosing sphere by farthest-point
/// iteration. Starts from the smallest id in `ids`; farthest-point ties go to
/// the smaller id. The returned radius is the distance from the final center
/// to the farthest member, so every member is enclosed exactly.
Sphere ames(const Dataset& data, std::span<const PointId> ids, double epsilon);
Sphere ames(const Dataset& data, double epsilon);

}  // namespace hdgknn
