#pragma once

#include <optional>

#include "lpstab/convex_body.hpp"

namespace lpstab {

struct DistanceResult {
  double value = 0;
  Vec translation{};
  std::optional<Mat3> map;
  int iterations = 0;
  bool converged = false;
};

// L^2 distance of support functions, ((1/omega_n) int (h_K - h_L)^2)^(1/2);
// bodies must share a grid.
double l2_distance(const ConvexBody& K, const ConvexBody& L);
double l2_distance_to_ball(const ConvexBody& K, double radius, const Vec& center = {});

// V(K delta L), computed radially from a common interior base point.
double symmetric_difference_volume(const ConvexBody& K, const ConvexBody& L, const Vec& base);

// Relative asymmetry A(K~, B): minimal V(K~ delta (B + x)) / kappa_n over
// ball translations x. Input is volume-normalized internally; the search
// starts at the Santalo point.
DistanceResult relative_asymmetry_to_ball(const ConvexBody& K);

// Upper bound for the Banach-Mazur distance to the ball: minimizes the
// outer/inner radial ratio of m(K - x) over interior centers x and
// unimodular SPD maps m (log-Cholesky parameterization, multi-start
// simplex search). The achieved ratio is always a valid upper bound.
DistanceResult banach_mazur_to_ball(const ConvexBody& K);

}  // namespace lpstab
