#pragma once

#include "lpstab/convex_body.hpp"

namespace lpstab {

// Extrema of the L_p-curvature h^{1-p} f over the sphere (grid extrema
// refined by local search) and their scale-invariant ratio.
struct LpCurvatureSummary {
  double p = 0;
  double min = 0;
  double max = 0;
  double ratio = 1;  // max / min
};

struct LpCurvatureResult {
  ScalarField field;
  LpCurvatureSummary summary;
};
LpCurvatureResult lp_curvature(const ConvexBody& K, double p);

// Centro-affine curvature H = (h^{n+1} f)^{-1}; min/max are SL(n)
// invariants, ratio is the L_{-n} curvature ratio.
struct CentroAffineResult {
  ScalarField field;
  double min = 0;
  double max = 0;
  double ratio = 1;
};
CentroAffineResult centro_affine_curvature(const ConvexBody& K);

// pointwise values at an arbitrary direction
double curvature_at(const ConvexBody& K, const Vec& u);
double lp_curvature_at(const ConvexBody& K, double p, const Vec& u);
double centro_affine_at(const ConvexBody& K, const Vec& u);

// body with support (a h_K^p + b h_L^p)^(1/p); p >= 1, a, b > 0
ConvexBody lp_sum(const ConvexBody& K, const ConvexBody& L, double a, double b, double p);

// V_p(K, L) = (1/n) int h_L^p h_K^{1-p} f_K dsigma
double lp_mixed_volume(const ConvexBody& K, const ConvexBody& L, double p);

// V_p(K, L) - V(K)^{1-p/n} V(L)^{p/n}; nonnegative for p >= 1, zero iff
// K and L are dilates
double minkowski_deficit(const ConvexBody& K, const ConvexBody& L, double p);

struct WidthResult {
  double p = 0;
  double value = 0;
  Vec point{};  // entropy point e_p
  double grad_norm = 0;
  int iterations = 0;
  bool converged = false;
  // false for p = 1, where the inner objective is constant in the base
  // point and no distinguished optimizer exists (the Santalo point is
  // returned as representative)
  bool attained = true;
};

// L_p width: optimal p-mean (log-mean for p = 0) of the support function
// over interior base points; inf for p > 1 and p < 0, sup for 0 <= p < 1.
// Requires p in [-n, inf).
WidthResult width_E_p(const ConvexBody& K, double p);

// gradient field of the scale-invariant width functional
// (int h^p)^{n/p} / V at h_K; zero exactly at critical bodies (balls)
ScalarField grad_width_field(const ConvexBody& K, double p);

// gradient field of 1/(V(K) V(K*)) at h_K; callers translate the Santalo
// point to the origin first
ScalarField grad_volume_product_field(const ConvexBody& K);

// kappa_n^2 - V(K) V(K^{s(K)}) >= 0, zero exactly for ellipsoids
double santalo_deficit(const ConvexBody& K);

}  // namespace lpstab
