#pragma once

#include <algorithm>
#include <cmath>

namespace lpstab {

inline constexpr double kPi = 3.14159265358979323846;

// Volume of the unit ball in R^n, closed form for any n >= 1.
inline double unit_ball_volume(int n) {
  return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

// Surface measure of the unit sphere S^{n-1} = n * kappa_n.
inline double sphere_surface(int n) { return n * unit_ball_volume(n); }

// Constant in the entropy-point/Santalo-point gap bound, 2n / (p(p-1)).
// Positive for p < 0.
inline double entropy_gap_constant(int n, double p) {
  return 2.0 * n / (p * (p - 1.0));
}

// Constant in the L^2 width-deficit bound for -n < p < 0:
// max{ n/(p+n), -n/p }.
inline double width_deficit_constant(int n, double p) {
  return std::max(n / (p + n), -n / p);
}

// Constant 1 + sqrt(4 omega_{n-1} / omega_n) appearing in the cube-root
// diameter bound.
inline double diameter_chain_constant(int n) {
  return 1.0 + std::sqrt(4.0 * sphere_surface(n - 1) / sphere_surface(n));
}

}  // namespace lpstab
