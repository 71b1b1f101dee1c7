#include "lpstab/convex_body.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lpstab/constants.hpp"
#include "lpstab/optim.hpp"

namespace lpstab {

namespace {

constexpr double kConvexityTol = 1e-8;

// coefficient of each Cartesian component of u in the basis
double linear_coeff_scale(int dim) { return dim == 2 ? 1.0 : std::sqrt(4.0 * kPi / 3.0); }

void add_linear(Spectrum& s, const Vec& x) {
  double k = linear_coeff_scale(s.dim);
  if (s.dim == 2) {
    s.c[1] += k * x[0];
    s.c[2] += k * x[1];
  } else {
    s.c[Spectrum::sph_index(1, 1)] += k * x[0];
    s.c[Spectrum::sph_index(1, -1)] += k * x[1];
    s.c[Spectrum::sph_index(1, 0)] += k * x[2];
  }
}

}  // namespace

ConvexBody ConvexBody::from_coefficients(std::shared_ptr<const SphereGrid> grid, Spectrum s) {
  if (s.dim != grid->dim()) throw BodyError("coefficient/grid dimension mismatch");
  if (s.degree > grid->max_degree()) throw BodyError("degree exceeds grid band limit");

  ConvexBody K;
  K.jets_ = grid->synthesize_jets(s);
  const int n = grid->node_count();

  double min_h = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) min_h = std::min(min_h, K.jets_.value[k]);
  if (!(min_h > 0))
    throw NotPositive("support function not positive (min h = " + std::to_string(min_h) + ")");

  K.curvature_.resize(n);
  double min_eig = std::numeric_limits<double>::infinity();
  if (grid->dim() == 2) {
    for (int k = 0; k < n; ++k) {
      double a = K.jets_.h11[k] + K.jets_.value[k];
      K.curvature_[k] = a;
      min_eig = std::min(min_eig, a);
    }
  } else {
    for (int k = 0; k < n; ++k) {
      double a11 = K.jets_.h11[k] + K.jets_.value[k];
      double a22 = K.jets_.h22[k] + K.jets_.value[k];
      double a12 = K.jets_.h12[k];
      K.curvature_[k] = a11 * a22 - a12 * a12;
      double mean = 0.5 * (a11 + a22);
      double rad = std::sqrt(0.25 * (a11 - a22) * (a11 - a22) + a12 * a12);
      min_eig = std::min(min_eig, mean - rad);
    }
  }
  if (!(min_eig > kConvexityTol))
    throw NotStrictlyConvex("support function not strictly convex (min eigenvalue = " +
                            std::to_string(min_eig) + ")");

  K.grid_ = std::move(grid);
  K.support_ = std::move(s);
  K.min_support_ = min_h;
  K.min_convexity_ = min_eig;
  return K;
}

std::optional<ConvexBody> ConvexBody::try_from_coefficients(
    std::shared_ptr<const SphereGrid> grid, Spectrum s, std::string* diagnostic) {
  try {
    return from_coefficients(std::move(grid), std::move(s));
  } catch (const BodyError& e) {
    if (diagnostic) *diagnostic = e.what();
    return std::nullopt;
  }
}

ConvexBody ConvexBody::on_grid(std::shared_ptr<const SphereGrid> grid) const {
  Spectrum s = support_.truncated(std::min(support_.degree, grid->max_degree()));
  return from_coefficients(std::move(grid), std::move(s));
}

ScalarField curvature_function(const ConvexBody& K) {
  return {K.grid(), K.curvature_values(), std::nullopt};
}

Vec boundary_point(const ConvexBody& K, const Vec& u) {
  SurfaceJet jet = evaluate_jet(K.support(), u);
  auto [e1, e2] = jet_frame(u, K.dim());
  Vec x = u * jet.h + e1 * jet.d1;
  if (K.dim() == 3) x += e2 * jet.d2;
  return x;
}

double volume(const ConvexBody& K) {
  const auto& w = K.grid()->weights();
  const auto& h = K.support_values();
  const auto& f = K.curvature_values();
  double s = 0;
  for (size_t k = 0; k < w.size(); ++k) s += w[k] * h[k] * f[k];
  return s / K.dim();
}

double diameter(const ConvexBody& K) {
  const auto& g = *K.grid();
  const auto& h = K.support_values();
  const int n = g.node_count();
  std::vector<std::pair<double, int>> ranked(n);
  for (int k = 0; k < n; ++k)
    ranked[k] = {h[k] + h[g.antipode_index(k)], k};
  int top = std::min(n, 12);
  std::partial_sort(ranked.begin(), ranked.begin() + top, ranked.end(), std::greater<>());

  auto width = [&](const Vec& u) { return K.support_at(u) + K.support_at(-u); };
  // refine from a few well separated top candidates
  double out = ranked[0].first;
  std::vector<Vec> seeds;
  for (int r = 0; r < top && seeds.size() < 3; ++r) {
    const Vec& cand = g.nodes()[ranked[r].second];
    bool close = false;
    for (const Vec& s : seeds)
      if (std::abs(dot(s, cand)) > 0.95) close = true;
    if (!close) seeds.push_back(cand);
  }
  for (const Vec& s : seeds) {
    SphereExtremum e = refine_on_sphere(width, s, K.dim(), /*maximize=*/true, 0.08);
    out = std::max(out, e.value);
  }
  return out;
}

ConvexBody translate(const ConvexBody& K, const Vec& x) {
  Spectrum s = K.support();
  add_linear(s, -x);
  try {
    return ConvexBody::from_coefficients(K.grid(), std::move(s));
  } catch (const NotPositive&) {
    throw TranslationLeavesOrigin("translation target is not interior to the body");
  }
}

ConvexBody scale(const ConvexBody& K, double lambda) {
  if (!(lambda > 0)) throw BodyError("scale factor must be positive");
  Spectrum s = K.support();
  for (double& c : s.c) c *= lambda;
  return ConvexBody::from_coefficients(K.grid(), std::move(s));
}

ConvexBody normalize_volume(const ConvexBody& K) {
  double v = volume(K);
  return scale(K, std::pow(unit_ball_volume(K.dim()) / v, 1.0 / K.dim()));
}

ConvexBody linear_image(const ConvexBody& K, const Mat3& map) {
  if (std::abs(map.det()) < 1e-12) throw BodyError("linear map is singular");
  // sample h_{mK}(u) = |m^T u| h_K(m^T u / |m^T u|) on a doubled grid, then
  // project back to the body's band limit
  auto fine = K.grid()->refined(2);
  std::vector<double> vals(fine->node_count());
  for (int k = 0; k < fine->node_count(); ++k) {
    Vec w = map.apply_transpose(fine->nodes()[k]);
    double r = norm(w);
    vals[k] = r * K.support_at(w * (1.0 / r));
  }
  Spectrum s = fine->analyze(vals, K.grid()->max_degree());
  try {
    return ConvexBody::from_coefficients(K.grid(), std::move(s));
  } catch (const BodyError& e) {
    throw NotStrictlyConvex(std::string("convexity lost after truncation: ") + e.what());
  }
}

namespace {

// Minimize h(v)/(u.v) over v by damped Newton in a tangent chart; the
// minimum is the radial function of K in direction u. The chart Hessian
// at the chart center equals the covariant Hessian, and the covariant
// Hessian of v -> u.v is -(u.v) g.
double radial_newton(const ConvexBody& K, const Vec& u, Vec v, bool* ok) {
  const int tdim = K.dim() - 1;
  double val = std::numeric_limits<double>::infinity();
  *ok = false;
  for (int it = 0; it < 40; ++it) {
    SurfaceJet jet = evaluate_jet(K.support(), v);
    auto [e1, e2] = jet_frame(v, K.dim());
    double s = dot(u, v);
    if (s < 1e-6) return val;
    double g0 = jet.h / s;
    val = g0;
    double sig[2] = {dot(u, e1), dot(u, e2)};
    double d[2] = {jet.d1, jet.d2};
    double grad[2] = {0, 0};
    double H[4] = {0, 0, 0, 0};
    for (int i = 0; i < tdim; ++i) grad[i] = d[i] / s - jet.h * sig[i] / (s * s);
    auto hij = [&](int i, int j) {
      if (i != j) return jet.h12;
      return i == 0 ? jet.h11 : jet.h22;
    };
    for (int i = 0; i < tdim; ++i)
      for (int j = 0; j < tdim; ++j)
        H[2 * i + j] = hij(i, j) / s - (d[i] * sig[j] + d[j] * sig[i]) / (s * s) +
                       (i == j ? jet.h / s : 0.0) + 2.0 * jet.h * sig[i] * sig[j] / (s * s * s);

    double gn = std::sqrt(grad[0] * grad[0] + (tdim > 1 ? grad[1] * grad[1] : 0.0));
    if (gn < 3e-10 * std::max(1.0, std::abs(g0))) {
      *ok = true;
      return g0;
    }

    double step[2] = {0, 0};
    if (tdim == 1) {
      if (H[0] <= 0) return val;
      step[0] = -grad[0] / H[0];
    } else {
      double det = H[0] * H[3] - H[1] * H[2];
      if (det <= 0 || H[0] <= 0) return val;  // not locally convex here
      step[0] = -(H[3] * grad[0] - H[1] * grad[1]) / det;
      step[1] = -(H[0] * grad[1] - H[2] * grad[0]) / det;
    }
    double slen = std::sqrt(step[0] * step[0] + step[1] * step[1]);
    if (slen < 1e-9) {  // quadratic regime, value already converged
      *ok = true;
      return g0;
    }
    double t = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 12; ++bt, t *= 0.5) {
      Vec vn = normalized(v + e1 * (t * step[0]) + (tdim > 1 ? e2 * (t * step[1]) : Vec{}));
      double sn = dot(u, vn);
      if (sn < 0.2 * s) continue;
      double g2 = K.support_at(vn) / sn;
      if (g2 <= g0) {
        v = vn;
        moved = true;
        break;
      }
    }
    if (!moved) {
      *ok = gn < 1e-6 * std::max(1.0, std::abs(g0));
      return val;
    }
  }
  return val;
}

int coarse_radial_argmin(const ConvexBody& K, const Vec& u, int stride) {
  const auto& nodes = K.grid()->nodes();
  const auto& h = K.support_values();
  int best = -1;
  double vbest = std::numeric_limits<double>::infinity();
  for (int k = 0; k < K.grid()->node_count(); k += stride) {
    double s = dot(u, nodes[k]);
    if (s <= 1e-9) continue;
    double v = h[k] / s;
    if (v < vbest) {
      vbest = v;
      best = k;
    }
  }
  return best;
}

double radial_refined(const ConvexBody& K, const Vec& u, int start_node) {
  bool ok = false;
  double v = radial_newton(K, u, K.grid()->nodes()[start_node], &ok);
  if (ok) return v;
  // fall back to derivative-free refinement around the best grid node
  int best = coarse_radial_argmin(K, u, 1);
  auto obj = [&](const Vec& w) {
    double s = dot(u, w);
    return s > 1e-9 ? K.support_at(w) / s : std::numeric_limits<double>::infinity();
  };
  SphereExtremum e = refine_on_sphere(obj, K.grid()->nodes()[best], K.dim(), false, 0.1);
  return std::min(e.value, v);
}

}  // namespace

double radial_function(const ConvexBody& K, const Vec& u) {
  int best = coarse_radial_argmin(K, u, 1);
  return radial_refined(K, u, best);
}

std::vector<double> radial_field(const ConvexBody& K, const Vec& base) {
  const auto& g = *K.grid();
  const auto& nodes = g.nodes();
  ConvexBody Kb = (norm(base) == 0.0) ? K : translate(K, base);

  std::vector<double> rho(g.node_count());
  const int stride = std::max(1, g.node_count() / 512);
  for (int k = 0; k < g.node_count(); ++k) {
    const Vec& u = nodes[k];
    // the normal at the boundary point in direction u is near u itself for
    // mildly eccentric bodies; a coarse scan covers the rest
    bool ok = false;
    double v1 = radial_newton(Kb, u, u, &ok);
    if (!ok) {
      int cb = coarse_radial_argmin(Kb, u, stride);
      bool ok2 = false;
      double v2 = radial_newton(Kb, u, nodes[cb], &ok2);
      if (!ok2) v2 = std::min(v2, radial_refined(Kb, u, cb));
      v1 = std::min(v1, v2);
    }
    rho[k] = v1;
  }
  return rho;
}

double polar_volume_at(const ConvexBody& K, const Vec& x) {
  const auto& g = *K.grid();
  const auto& h = K.support_values();
  const auto& w = g.weights();
  double s = 0;
  for (int k = 0; k < g.node_count(); ++k) {
    double hx = h[k] - dot(x, g.nodes()[k]);
    if (!(hx > 0)) throw BodyError("polar volume base point is not interior");
    s += w[k] * std::pow(hx, -K.dim());
  }
  return s / K.dim();
}

SantaloResult santalo_point(const ConvexBody& K) {
  const auto& g = *K.grid();
  const auto& h = K.support_values();
  const auto& w = g.weights();
  const int dim = K.dim();
  const double kappa = unit_ball_volume(dim);

  auto min_margin = [&](const std::vector<double>& x) {
    Vec xv{x[0], x[1], dim == 3 ? x[2] : 0.0};
    double m = std::numeric_limits<double>::infinity();
    for (int k = 0; k < g.node_count(); ++k) m = std::min(m, h[k] - dot(xv, g.nodes()[k]));
    return m;
  };
  auto value = [&](const std::vector<double>& x) {
    Vec xv{x[0], x[1], dim == 3 ? x[2] : 0.0};
    double s = 0;
    for (int k = 0; k < g.node_count(); ++k) {
      double hx = h[k] - dot(xv, g.nodes()[k]);
      if (!(hx > 0)) return std::numeric_limits<double>::infinity();
      s += w[k] * std::pow(hx, -dim);
    }
    return s / dim;
  };
  auto grad = [&](const std::vector<double>& x, std::vector<double>& out) {
    Vec xv{x[0], x[1], dim == 3 ? x[2] : 0.0};
    Vec acc{};
    for (int k = 0; k < g.node_count(); ++k) {
      double hx = h[k] - dot(xv, g.nodes()[k]);
      acc += g.nodes()[k] * (w[k] * std::pow(hx, -dim - 1));
    }
    for (int i = 0; i < dim; ++i) out[i] = acc[i];
  };
  // finite-difference Hessian from the analytic gradient
  auto hess = [&](const std::vector<double>& x, std::vector<double>& out) {
    double delta = 1e-6 * K.min_support();
    std::vector<double> gp(dim), gm(dim), xp(x), xm(x);
    for (int j = 0; j < dim; ++j) {
      xp[j] = x[j] + delta;
      xm[j] = x[j] - delta;
      grad(xp, gp);
      grad(xm, gm);
      for (int i = 0; i < dim; ++i) out[i * dim + j] = (gp[i] - gm[i]) / (2 * delta);
      xp[j] = x[j];
      xm[j] = x[j];
    }
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j) {
        double s = 0.5 * (out[i * dim + j] + out[j * dim + i]);
        out[i * dim + j] = out[j * dim + i] = s;
      }
  };

  NewtonOptions opts;
  opts.max_iter = 120;
  opts.grad_tol = 1e-9 * kappa;
  opts.feasible = [&](const std::vector<double>& x) {
    return min_margin(x) > 1e-9 * K.min_support();
  };
  NewtonResult r = newton_minimize(dim, value, grad, hess, std::vector<double>(dim, 0.0), opts);

  SantaloResult out;
  out.point = Vec{r.x[0], r.x[1], dim == 3 ? r.x[2] : 0.0};
  out.polar_volume = r.value;
  out.grad_norm = r.grad_norm;
  out.iterations = r.iterations;
  out.converged = r.converged;
  return out;
}

ConvexBody polar_body(const ConvexBody& K) {
  std::vector<double> rho = radial_field(K, Vec{});
  std::vector<double> hstar(rho.size());
  for (size_t k = 0; k < rho.size(); ++k) hstar[k] = 1.0 / rho[k];
  Spectrum s = K.grid()->analyze(hstar);
  return ConvexBody::from_coefficients(K.grid(), std::move(s));
}

}  // namespace lpstab
