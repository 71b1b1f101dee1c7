// Test-side oracles, independent of the library's evaluation paths:
// direct basis summation through std::sph_legendre / std::cos, dense
// finite differences, closed ellipsoid forms, and seeded Monte-Carlo
// membership sampling.
#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "lpstab/convex_body.hpp"
#include "lpstab/sphere_grid.hpp"

namespace oracles {

using lpstab::ConvexBody;
using lpstab::Spectrum;
using lpstab::Vec;

// real spherical harmonic matching the library convention (no
// Condon-Shortley phase; std::sph_legendre carries (-1)^m, removed here)
inline double real_sph(int l, int m, double theta, double phi) {
  int am = std::abs(m);
  double base = std::sph_legendre(l, am, theta) * (am % 2 ? -1.0 : 1.0);
  if (m == 0) return base;
  return std::sqrt(2.0) * base * (m > 0 ? std::cos(am * phi) : std::sin(am * phi));
}

// direct summation of a spectrum at one direction
inline double direct_eval(const Spectrum& s, double theta, double phi = 0.0) {
  double v = 0;
  if (s.dim == 2) {
    v = s.c[0];
    for (int k = 1; k <= s.degree; ++k)
      v += s.c[2 * k - 1] * std::cos(k * theta) + s.c[2 * k] * std::sin(k * theta);
    return v;
  }
  for (int l = 0; l <= s.degree; ++l)
    for (int m = -l; m <= l; ++m)
      v += s.c[Spectrum::sph_index(l, m)] * real_sph(l, m, theta, phi);
  return v;
}

// second derivative of a planar spectrum by dense central differences
// (five-point stencil), independent of the spectral derivative path
inline double fd_second_derivative(const Spectrum& s, double theta, double step) {
  return (-direct_eval(s, theta + 2 * step) + 16.0 * direct_eval(s, theta + step) -
          30.0 * direct_eval(s, theta) + 16.0 * direct_eval(s, theta - step) -
          direct_eval(s, theta - 2 * step)) /
         (12.0 * step * step);
}

inline double u01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

struct McEstimate {
  double value = 0;
  double stderr_ = 0;
};

// membership via the support inequality over all grid directions
inline bool contains(const ConvexBody& K, const Vec& x) {
  const auto& g = *K.grid();
  for (int k = 0; k < g.node_count(); ++k)
    if (dot(x, g.nodes()[k]) > K.support_values()[k]) return false;
  return true;
}

inline std::pair<Vec, Vec> bounding_box(const ConvexBody& K) {
  Vec lo, hi;
  for (int i = 0; i < K.dim(); ++i) {
    Vec e{};
    e[i] = 1.0;
    hi[i] = K.support_at(e);
    e[i] = -1.0;
    lo[i] = -K.support_at(e);
  }
  return {lo, hi};
}

inline McEstimate mc_volume(const ConvexBody& K, unsigned seed, int samples) {
  auto [lo, hi] = bounding_box(K);
  double box = 1;
  for (int i = 0; i < K.dim(); ++i) box *= hi[i] - lo[i];
  std::mt19937_64 rng(seed);
  int inside = 0;
  for (int s = 0; s < samples; ++s) {
    Vec x;
    for (int i = 0; i < K.dim(); ++i) x[i] = lo[i] + (hi[i] - lo[i]) * u01(rng);
    inside += contains(K, x);
  }
  double p = double(inside) / samples;
  return {box * p, box * std::sqrt(p * (1 - p) / samples)};
}

inline McEstimate mc_symmetric_difference(const ConvexBody& K, const ConvexBody& L,
                                          unsigned seed, int samples) {
  auto [lo1, hi1] = bounding_box(K);
  auto [lo2, hi2] = bounding_box(L);
  Vec lo, hi;
  for (int i = 0; i < K.dim(); ++i) {
    lo[i] = std::min(lo1[i], lo2[i]);
    hi[i] = std::max(hi1[i], hi2[i]);
  }
  double box = 1;
  for (int i = 0; i < K.dim(); ++i) box *= hi[i] - lo[i];
  std::mt19937_64 rng(seed);
  int inside = 0;
  for (int s = 0; s < samples; ++s) {
    Vec x;
    for (int i = 0; i < K.dim(); ++i) x[i] = lo[i] + (hi[i] - lo[i]) * u01(rng);
    inside += contains(K, x) != contains(L, x);
  }
  double p = double(inside) / samples;
  return {box * p, box * std::sqrt(p * (1 - p) / samples)};
}

// support function samples of A*B (SPD A) on a grid
inline std::vector<double> ellipsoid_support(const lpstab::SphereGrid& g, const lpstab::Mat3& A) {
  std::vector<double> v(g.node_count());
  for (int k = 0; k < g.node_count(); ++k) v[k] = norm(A.apply(g.nodes()[k]));
  return v;
}

}  // namespace oracles
