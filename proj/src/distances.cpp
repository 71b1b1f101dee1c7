#include "lpstab/distances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "lpstab/constants.hpp"
#include "lpstab/optim.hpp"

namespace lpstab {

namespace {

void require_same_grid(const ConvexBody& K, const ConvexBody& L) {
  if (K.grid() != L.grid() && K.grid()->resolution() != L.grid()->resolution())
    throw BodyError("bodies live on different grids");
}

double interior_margin(const ConvexBody& K, const Vec& x) {
  const auto& g = *K.grid();
  double m = std::numeric_limits<double>::infinity();
  for (int k = 0; k < g.node_count(); ++k)
    m = std::min(m, K.support_values()[k] - dot(x, g.nodes()[k]));
  return m;
}

// radial function of a ball of radius r centred at z, seen from the origin;
// requires |z| < r
double ball_radial(const Vec& z, double r, const Vec& u) {
  double zu = dot(z, u);
  return zu + std::sqrt(r * r - dot(z, z) + zu * zu);
}

// boundary points at all grid nodes from the cached jets
std::vector<Vec> boundary_cloud(const ConvexBody& K) {
  const auto& g = *K.grid();
  const auto& jets = K.support_jets();
  std::vector<Vec> pts(g.node_count());
  for (int k = 0; k < g.node_count(); ++k) {
    const Vec& u = g.nodes()[k];
    auto [e1, e2] = jet_frame(u, K.dim());
    Vec x = u * jets.value[k] + e1 * jets.g1[k];
    if (K.dim() == 3) x += e2 * jets.g2[k];
    pts[k] = x;
  }
  return pts;
}

}  // namespace

double l2_distance(const ConvexBody& K, const ConvexBody& L) {
  require_same_grid(K, L);
  const auto& g = *K.grid();
  double s = 0;
  for (int k = 0; k < g.node_count(); ++k) {
    double d = K.support_values()[k] - L.support_values()[k];
    s += g.weights()[k] * d * d;
  }
  return std::sqrt(s / sphere_surface(K.dim()));
}

double l2_distance_to_ball(const ConvexBody& K, double radius, const Vec& center) {
  const auto& g = *K.grid();
  double s = 0;
  for (int k = 0; k < g.node_count(); ++k) {
    double d = K.support_values()[k] - radius - dot(center, g.nodes()[k]);
    s += g.weights()[k] * d * d;
  }
  return std::sqrt(s / sphere_surface(K.dim()));
}

double symmetric_difference_volume(const ConvexBody& K, const ConvexBody& L, const Vec& base) {
  require_same_grid(K, L);
  if (!(interior_margin(K, base) > 0) || !(interior_margin(L, base) > 0))
    throw BodyError("no common interior point for the requested base");
  const auto& g = *K.grid();
  std::vector<double> rk = radial_field(K, base);
  std::vector<double> rl = radial_field(L, base);
  const int n = K.dim();
  double s = 0;
  for (int k = 0; k < g.node_count(); ++k)
    s += g.weights()[k] * std::abs(std::pow(rk[k], n) - std::pow(rl[k], n));
  return s / n;
}

DistanceResult relative_asymmetry_to_ball(const ConvexBody& K) {
  const int n = K.dim();
  const double kappa = unit_ball_volume(n);
  ConvexBody Kt = normalize_volume(K);
  Vec c = santalo_point(Kt).point;
  std::vector<double> rho = radial_field(Kt, c);
  const auto& g = *Kt.grid();

  // V(K~ delta (B + x)) with the body's radial field fixed about c; the
  // ball side has a closed-form radial function
  auto sym_diff = [&](const std::vector<double>& xv) {
    Vec x{xv[0], xv[1], n == 3 ? xv[2] : 0.0};
    Vec z = x - c;
    if (dot(z, z) > 0.96) return std::numeric_limits<double>::infinity();
    double s = 0;
    for (int k = 0; k < g.node_count(); ++k) {
      double rb = ball_radial(z, 1.0, g.nodes()[k]);
      s += g.weights()[k] * std::abs(std::pow(rho[k], n) - std::pow(rb, n));
    }
    return s / n;
  };

  std::vector<double> x0(n);
  for (int i = 0; i < n; ++i) x0[i] = c[i];
  NelderMeadOptions opts;
  opts.max_iter = 300;
  opts.xtol = 1e-9;
  opts.ftol = 1e-12;
  NelderMeadResult r = nelder_mead(sym_diff, x0, 0.05, opts);
  NelderMeadResult r2 = nelder_mead(sym_diff, r.x, 0.005, opts);
  if (r2.value < r.value) r = r2;

  DistanceResult out;
  out.value = r.value / kappa;
  out.translation = Vec{r.x[0], r.x[1], n == 3 ? r.x[2] : 0.0};
  out.iterations = r.iterations;
  out.converged = r.converged;
  return out;
}

namespace {

struct BmParams {
  Vec x;
  Mat3 m;
};

// unimodular SPD map from log-Cholesky parameters
Mat3 spd_from_params(int n, const double* c) {
  Mat3 L = Mat3::diag(std::exp(c[0]), 0.0, 1.0);
  if (n == 2) {
    L(1, 0) = c[1];
    L(1, 1) = std::exp(c[2]);
  } else {
    L(1, 0) = c[1];
    L(1, 1) = std::exp(c[2]);
    L(2, 0) = c[3];
    L(2, 1) = c[4];
    L(2, 2) = std::exp(c[5]);
  }
  Mat3 m = L * L.transposed();
  double d = m.det();  // embedded 2x2 keeps det via the identity pad
  double s = std::pow(d, -1.0 / n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) *= s;
  return m;
}

BmParams unpack_bm(int n, const std::vector<double>& z) {
  BmParams p;
  p.x = Vec{z[0], z[1], n == 3 ? z[2] : 0.0};
  p.m = spd_from_params(n, z.data() + n);
  return p;
}

// initial center and shape estimates: degree-1 content recovers the center
// of an ellipsoid exactly, and h^2 of a centred ellipsoid is the quadratic
// form u^T A^2 u
void smart_bm_init(const ConvexBody& K, Vec* x0, Mat3* chol) {
  const auto& g = *K.grid();
  const int n = K.dim();
  Vec cen{};
  for (int k = 0; k < g.node_count(); ++k)
    cen += g.nodes()[k] * (g.weights()[k] * K.support_values()[k]);
  cen = cen * (static_cast<double>(n) / sphere_surface(n));
  if (!(interior_margin(K, cen) > 0)) cen = Vec{};
  *x0 = cen;

  const int q = n * (n + 1) / 2;
  Eigen::MatrixXd ata = Eigen::MatrixXd::Zero(q, q);
  Eigen::VectorXd atb = Eigen::VectorXd::Zero(q);
  auto basis = [&](const Vec& u, int t) {
    static const int pairs2[3][2] = {{0, 0}, {1, 1}, {0, 1}};
    static const int pairs3[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
    const int* pr = n == 2 ? pairs2[t] : pairs3[t];
    double v = u[pr[0]] * u[pr[1]];
    return pr[0] == pr[1] ? v : 2.0 * v;
  };
  Eigen::VectorXd row(q);
  for (int k = 0; k < g.node_count(); ++k) {
    const Vec& u = g.nodes()[k];
    double h = K.support_values()[k] - dot(cen, u);
    for (int t = 0; t < q; ++t) row[t] = basis(u, t);
    double w = g.weights()[k];
    ata += w * row * row.transpose();
    atb += w * h * h * row;
  }
  Eigen::VectorXd sol = ata.ldlt().solve(atb);
  Eigen::MatrixXd Q(n, n);
  if (n == 2) {
    Q << sol[0], sol[2], sol[2], sol[1];
  } else {
    Q << sol[0], sol[3], sol[4], sol[3], sol[1], sol[5], sol[4], sol[5], sol[2];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Q);
  Mat3 m0 = Mat3::identity();
  if (eig.info() == Eigen::Success && eig.eigenvalues().minCoeff() > 1e-12) {
    // m0 = Q^{-1/2}; maps the fitted ellipsoid back to a ball
    Eigen::MatrixXd isq = eig.operatorInverseSqrt();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m0(i, j) = isq(i, j);
  }
  // log-Cholesky parameters of m0
  Eigen::MatrixXd md(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) md(i, j) = m0(i, j);
  Eigen::LLT<Eigen::MatrixXd> llt(md);
  Mat3 Lc = Mat3::identity();
  if (llt.info() == Eigen::Success) {
    Eigen::MatrixXd Lm = llt.matrixL();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) Lc(i, j) = Lm(i, j);
  }
  *chol = Lc;
}

}  // namespace

DistanceResult banach_mazur_to_ball(const ConvexBody& K) {
  const int n = K.dim();
  const auto& g = *K.grid();
  std::vector<Vec> cloud = boundary_cloud(K);
  const int nparam = n + n * (n + 1) / 2;

  std::vector<double> norms(g.node_count());
  auto sampled_ratio = [&](const BmParams& p) {
    if (!(interior_margin(K, p.x) > 1e-9 * K.min_support()))
      return std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    for (int k = 0; k < g.node_count(); ++k) {
      double r = norm(p.m.apply(cloud[k] - p.x));
      norms[k] = r;
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    return hi / lo;
  };
  auto objective = [&](const std::vector<double>& z) { return sampled_ratio(unpack_bm(n, z)); };

  Vec x0;
  Mat3 L0;
  smart_bm_init(K, &x0, &L0);
  std::vector<double> z0(nparam, 0.0);
  for (int i = 0; i < n; ++i) z0[i] = x0[i];
  if (n == 2) {
    z0[n + 0] = std::log(L0(0, 0));
    z0[n + 1] = L0(1, 0);
    z0[n + 2] = std::log(L0(1, 1));
  } else {
    z0[n + 0] = std::log(L0(0, 0));
    z0[n + 1] = L0(1, 0);
    z0[n + 2] = std::log(L0(1, 1));
    z0[n + 3] = L0(2, 0);
    z0[n + 4] = L0(2, 1);
    z0[n + 5] = std::log(L0(2, 2));
  }

  double init_ratio = objective(z0);
  std::vector<double> zbest = z0;
  double fbest = init_ratio;
  int iterations = 0;
  bool converged = true;

  if (!(init_ratio <= 1.0 + 1e-12)) {
    std::mt19937 rng(20240u + static_cast<unsigned>(n));
    auto uni = [&]() { return 2.0 * (rng() >> 11) * 0x1.0p-53 - 1.0; };
    NelderMeadOptions opts;
    opts.max_iter = n == 2 ? 500 : 900;
    opts.xtol = 1e-10;
    opts.ftol = 1e-13;
    converged = false;
    for (int start = 0; start < 8; ++start) {
      std::vector<double> z = z0;
      if (start > 0)
        for (int i = 0; i < nparam; ++i) z[i] += 0.15 * uni();
      NelderMeadResult r = nelder_mead(objective, z, start == 0 ? 0.02 : 0.1, opts);
      iterations += r.iterations;
      if (r.value < fbest) {
        fbest = r.value;
        zbest = r.x;
        converged = r.converged;
      }
    }
    // polish the incumbent
    NelderMeadResult r = nelder_mead(objective, zbest, 0.002, opts);
    iterations += r.iterations;
    if (r.value < fbest) {
      fbest = r.value;
      zbest = r.x;
      converged = r.converged || converged;
    }
  }

  // certificate: true outer/inner radii at the chosen map, refined on the
  // sphere from the sampled extrema
  BmParams best = unpack_bm(n, zbest);
  sampled_ratio(best);  // fills `norms`
  auto point_norm = [&](const Vec& u) {
    SurfaceJet jet = evaluate_jet(K.support(), u);
    auto [e1, e2] = jet_frame(u, n);
    Vec pnt = u * jet.h + e1 * jet.d1;
    if (n == 3) pnt += e2 * jet.d2;
    return norm(best.m.apply(pnt - best.x));
  };
  double hi = 0, lo = std::numeric_limits<double>::infinity();
  for (int k : separated_extrema(g.nodes(), norms, true, 3))
    hi = std::max(hi, refine_on_sphere(point_norm, g.nodes()[k], n, true, 0.06).value);
  for (int k : separated_extrema(g.nodes(), norms, false, 3))
    lo = std::min(lo, refine_on_sphere(point_norm, g.nodes()[k], n, false, 0.06).value);

  DistanceResult out;
  out.value = std::max(1.0, hi / lo);
  out.translation = best.x;
  out.map = best.m;
  out.iterations = iterations;
  out.converged = converged;
  return out;
}

}  // namespace lpstab
