#include "lpstab/lp_functionals.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "lpstab/constants.hpp"
#include "lpstab/optim.hpp"

namespace lpstab {

namespace {

double curvature_of_jet(const SurfaceJet& jet, int dim) {
  if (dim == 2) return jet.h11 + jet.h;
  double a11 = jet.h11 + jet.h, a22 = jet.h22 + jet.h, a12 = jet.h12;
  return a11 * a22 - a12 * a12;
}

// min/max of a pointwise functional over the sphere, grid extrema refined
// by local search
std::pair<double, double> refined_extrema(const ConvexBody& K,
                                          const std::vector<double>& node_values,
                                          const std::function<double(const Vec&)>& eval) {
  const auto& nodes = K.grid()->nodes();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : node_values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (int k : separated_extrema(nodes, node_values, false, 3))
    lo = std::min(lo, refine_on_sphere(eval, nodes[k], K.dim(), false, 0.06).value);
  for (int k : separated_extrema(nodes, node_values, true, 3))
    hi = std::max(hi, refine_on_sphere(eval, nodes[k], K.dim(), true, 0.06).value);
  return {lo, hi};
}

}  // namespace

double curvature_at(const ConvexBody& K, const Vec& u) {
  return curvature_of_jet(evaluate_jet(K.support(), u), K.dim());
}

double lp_curvature_at(const ConvexBody& K, double p, const Vec& u) {
  SurfaceJet jet = evaluate_jet(K.support(), u);
  return std::pow(jet.h, 1.0 - p) * curvature_of_jet(jet, K.dim());
}

double centro_affine_at(const ConvexBody& K, const Vec& u) {
  SurfaceJet jet = evaluate_jet(K.support(), u);
  return 1.0 / (std::pow(jet.h, K.dim() + 1.0) * curvature_of_jet(jet, K.dim()));
}

LpCurvatureResult lp_curvature(const ConvexBody& K, double p) {
  const auto& h = K.support_values();
  const auto& f = K.curvature_values();
  std::vector<double> vals(h.size());
  for (size_t k = 0; k < h.size(); ++k) vals[k] = std::pow(h[k], 1.0 - p) * f[k];

  auto [lo, hi] =
      refined_extrema(K, vals, [&](const Vec& u) { return lp_curvature_at(K, p, u); });
  return {{K.grid(), std::move(vals), std::nullopt}, {p, lo, hi, hi / lo}};
}

CentroAffineResult centro_affine_curvature(const ConvexBody& K) {
  const auto& h = K.support_values();
  const auto& f = K.curvature_values();
  std::vector<double> vals(h.size());
  for (size_t k = 0; k < h.size(); ++k)
    vals[k] = 1.0 / (std::pow(h[k], K.dim() + 1.0) * f[k]);

  auto [lo, hi] = refined_extrema(K, vals, [&](const Vec& u) { return centro_affine_at(K, u); });
  return {{K.grid(), std::move(vals), std::nullopt}, lo, hi, hi / lo};
}

ConvexBody lp_sum(const ConvexBody& K, const ConvexBody& L, double a, double b, double p) {
  if (p < 1.0) throw BodyError("lp_sum requires p >= 1");
  if (!(a > 0) || !(b > 0)) throw BodyError("lp_sum requires positive weights");
  if (K.grid() != L.grid() && K.grid()->resolution() != L.grid()->resolution())
    throw BodyError("bodies live on different grids");
  const auto& hk = K.support_values();
  const auto& hl = L.support_values();
  std::vector<double> vals(hk.size());
  for (size_t k = 0; k < hk.size(); ++k)
    vals[k] = std::pow(a * std::pow(hk[k], p) + b * std::pow(hl[k], p), 1.0 / p);
  Spectrum s = K.grid()->analyze(vals);
  return ConvexBody::from_coefficients(K.grid(), std::move(s));
}

double lp_mixed_volume(const ConvexBody& K, const ConvexBody& L, double p) {
  if (K.grid() != L.grid() && K.grid()->resolution() != L.grid()->resolution())
    throw BodyError("bodies live on different grids");
  const auto& g = *K.grid();
  const auto& hk = K.support_values();
  const auto& hl = L.support_values();
  const auto& f = K.curvature_values();
  double s = 0;
  for (int k = 0; k < g.node_count(); ++k)
    s += g.weights()[k] * std::pow(hl[k], p) * std::pow(hk[k], 1.0 - p) * f[k];
  return s / K.dim();
}

double minkowski_deficit(const ConvexBody& K, const ConvexBody& L, double p) {
  if (p < 1.0) throw BodyError("minkowski_deficit requires p >= 1");
  const int n = K.dim();
  return lp_mixed_volume(K, L, p) -
         std::pow(volume(K), 1.0 - p / n) * std::pow(volume(L), p / n);
}

WidthResult width_E_p(const ConvexBody& K, double p) {
  const int n = K.dim();
  if (p < -static_cast<double>(n)) throw BodyError("width exponent below -n");
  const auto& g = *K.grid();
  const auto& h = K.support_values();
  const auto& w = g.weights();
  const double omega = sphere_surface(n);

  WidthResult out;
  out.p = p;

  if (p == 1.0) {
    // the objective is constant in the base point: int (h - x.u) = int h
    double s = 0;
    for (int k = 0; k < g.node_count(); ++k) s += w[k] * h[k];
    out.value = s / omega;
    out.point = santalo_point(K).point;
    out.converged = true;
    out.attained = false;
    return out;
  }

  const bool logcase = (p == 0.0);
  // sup for 0 <= p < 1, inf otherwise
  const double sgn = (p > 0.0 && p < 1.0) || logcase ? -1.0 : 1.0;

  std::vector<double> m(g.node_count());
  auto margins = [&](const std::vector<double>& x) {
    Vec xv{x[0], x[1], n == 3 ? x[2] : 0.0};
    for (int k = 0; k < g.node_count(); ++k) m[k] = h[k] - dot(xv, g.nodes()[k]);
  };

  auto value = [&](const std::vector<double>& x) {
    margins(x);
    double s = 0;
    for (int k = 0; k < g.node_count(); ++k) {
      if (!(m[k] > 0)) return std::numeric_limits<double>::infinity();
      s += w[k] * (logcase ? std::log(m[k]) : std::pow(m[k], p));
    }
    return sgn * s / omega;
  };
  auto grad = [&](const std::vector<double>& x, std::vector<double>& out_g) {
    margins(x);
    Vec acc{};
    for (int k = 0; k < g.node_count(); ++k) {
      double c = logcase ? 1.0 / m[k] : p * std::pow(m[k], p - 1.0);
      acc += g.nodes()[k] * (-w[k] * c);
    }
    for (int i = 0; i < n; ++i) out_g[i] = sgn * acc[i] / omega;
  };
  auto hess = [&](const std::vector<double>& x, std::vector<double>& out_h) {
    margins(x);
    std::fill(out_h.begin(), out_h.end(), 0.0);
    for (int k = 0; k < g.node_count(); ++k) {
      double c = logcase ? -1.0 / (m[k] * m[k]) : p * (p - 1.0) * std::pow(m[k], p - 2.0);
      const Vec& u = g.nodes()[k];
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out_h[i * n + j] += sgn * w[k] * c * u[i] * u[j] / omega;
    }
  };

  NewtonOptions opts;
  opts.max_iter = 120;
  opts.grad_tol = 1e-11;
  const double floor = 1e-6 * K.min_support();
  opts.feasible = [&](const std::vector<double>& x) {
    Vec xv{x[0], x[1], n == 3 ? x[2] : 0.0};
    double mm = std::numeric_limits<double>::infinity();
    for (int k = 0; k < g.node_count(); ++k) mm = std::min(mm, h[k] - dot(xv, g.nodes()[k]));
    return mm >= floor;
  };

  NewtonResult r = newton_minimize(n, value, grad, hess, std::vector<double>(n, 0.0), opts);
  out.value = sgn * r.value;
  out.point = Vec{r.x[0], r.x[1], n == 3 ? r.x[2] : 0.0};
  out.grad_norm = r.grad_norm;
  out.iterations = r.iterations;
  out.converged = r.converged;
  return out;
}

ScalarField grad_width_field(const ConvexBody& K, double p) {
  if (p == 0.0) throw BodyError("width gradient needs p != 0");
  const auto& g = *K.grid();
  const auto& h = K.support_values();
  const auto& f = K.curvature_values();
  const int n = K.dim();
  double ip = 0;
  for (int k = 0; k < g.node_count(); ++k) ip += g.weights()[k] * std::pow(h[k], p);
  double vol = volume(K);
  double front = std::pow(ip, n / p) / (vol * vol);
  std::vector<double> vals(g.node_count());
  for (int k = 0; k < g.node_count(); ++k)
    vals[k] =
        front * std::pow(h[k], p - 1.0) * (n * vol / ip - std::pow(h[k], 1.0 - p) * f[k]);
  return {K.grid(), std::move(vals), std::nullopt};
}

ScalarField grad_volume_product_field(const ConvexBody& K) {
  const auto& g = *K.grid();
  const auto& h = K.support_values();
  const auto& f = K.curvature_values();
  const int n = K.dim();
  double vol = volume(K);
  double vstar = polar_volume_at(K, Vec{});
  double pk = 1.0 / (vol * vstar);
  std::vector<double> vals(g.node_count());
  for (int k = 0; k < g.node_count(); ++k)
    vals[k] = pk * pk * (vol / std::pow(h[k], n + 1.0) - vstar * f[k]);
  return {K.grid(), std::move(vals), std::nullopt};
}

double santalo_deficit(const ConvexBody& K) {
  double kappa = unit_ball_volume(K.dim());
  SantaloResult s = santalo_point(K);
  return kappa * kappa - volume(K) * s.polar_volume;
}

}  // namespace lpstab
