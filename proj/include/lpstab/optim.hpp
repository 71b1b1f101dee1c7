#pragma once

#include <functional>
#include <vector>

#include "lpstab/vec.hpp"

namespace lpstab {

struct NelderMeadOptions {
  int max_iter = 400;
  double xtol = 1e-10;   // simplex diameter
  double ftol = 1e-13;   // value spread
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Downhill simplex minimization with the standard adaptive coefficients.
// The objective may return +inf to reject infeasible points.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& x0, double step,
                             const NelderMeadOptions& opts = {});

struct NewtonOptions {
  int max_iter = 80;
  double grad_tol = 1e-11;
  // Candidate steps are rejected while feasible(x) is false.
  std::function<bool(const std::vector<double>&)> feasible;
};

struct NewtonResult {
  std::vector<double> x;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Damped Newton minimization in dimension <= 3. grad/hess fill caller
// buffers (hess row-major dim x dim). Falls back to steepest descent when
// the Hessian solve fails or does not produce a descent direction.
NewtonResult newton_minimize(
    int dim, const std::function<double(const std::vector<double>&)>& value,
    const std::function<void(const std::vector<double>&, std::vector<double>&)>& grad,
    const std::function<void(const std::vector<double>&, std::vector<double>&)>& hess,
    const std::vector<double>& x0, const NewtonOptions& opts);

// Golden-section minimization of a unimodal function on [a, b].
double golden_section(const std::function<double(double)>& f, double a, double b,
                      double tol, double* xmin);

// Orthonormal tangent basis at a unit vector. dim = 2 returns the rotated
// direction in the plane; dim = 3 any fixed pair orthogonal to u.
std::pair<Vec, Vec> tangent_basis(const Vec& u, int dim);

struct SphereExtremum {
  Vec point;
  double value = 0.0;
};

// Up to `count` indices of extremal entries of `key`, pairwise separated by
// direction (dot below 0.9); seeds for local refinement on the sphere.
std::vector<int> separated_extrema(const std::vector<Vec>& nodes, const std::vector<double>& key,
                                   bool maximize, int count);

// Local refinement of an extremum of a smooth scalar function on S^{n-1},
// started at u0. Uses golden section along the circle for dim 2 and
// Nelder-Mead in a tangent chart for dim 3.
SphereExtremum refine_on_sphere(const std::function<double(const Vec&)>& f, const Vec& u0,
                                int dim, bool maximize, double initial_step = 0.05);

}  // namespace lpstab
