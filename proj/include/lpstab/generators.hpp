#pragma once

#include <string>
#include <vector>

#include "lpstab/convex_body.hpp"

namespace lpstab {

inline constexpr int kDefaultCircleNodes = 512;
inline constexpr int kDefaultGaussOrder = 48;
inline constexpr int kDefaultLongitudes = 96;

// default grid for a dimension, optionally overridden by an explicit
// resolution ({N} or {L, M})
std::shared_ptr<const SphereGrid> default_grid(int dim, const std::vector<int>& resolution = {});

// Serializable generator description; make_body reproduces the body
// deterministically from it.
struct BodySpec {
  std::string family;  // ball | ellipsoid | harmonic | cap_cut | random
  int dimension = 2;
  std::vector<int> resolution;  // empty -> defaults

  double radius = 1.0;              // ball
  Mat3 axes = Mat3::identity();     // ellipsoid: SPD matrix A, body = A B
  double eps = 0.0;                 // harmonic amplitude / cap height
  int degree = 0;                   // harmonic degree
  int order = 0;                    // harmonic order (n = 3)
  double smoothing = 0.0;           // cap_cut damping; <= 0 picks the ladder value
  unsigned seed = 0;                // random
  double decay = 3.0;               // random spectral decay exponent

  std::string name() const;
};

ConvexBody ball(double r, std::shared_ptr<const SphereGrid> grid);
ConvexBody ellipsoid(const Mat3& A, std::shared_ptr<const SphereGrid> grid);
// h = 1 + eps * basis(degree, order); order is ignored for n = 2
ConvexBody harmonic_bump(double eps, int degree, int order,
                         std::shared_ptr<const SphereGrid> grid);
// seeded band-limited perturbation of the ball with power-law decay;
// redraws until valid (at most 100 attempts)
ConvexBody random_convex(unsigned seed, double decay, std::shared_ptr<const SphereGrid> grid);
// unit ball with opposite caps of height eps cut off, mollified by the
// spectral damping exp(-s k^2); smoothing <= 0 selects the smallest value
// of the ladder {1e-3 * 2^j} that restores strict convexity
ConvexBody smoothed_cap_cut(double cap_height, double smoothing,
                            std::shared_ptr<const SphereGrid> grid);

// largest amplitude keeping 1 + eps * basis(degree, order) strictly convex;
// closed form 1/(k^2 - 1) for n = 2, bisection for n = 3
double harmonic_convexity_threshold(int dim, int degree, int order);

ConvexBody make_body(const BodySpec& spec);

// body families exercised by the verification suite
std::vector<BodySpec> default_suite(int dim);

}  // namespace lpstab
