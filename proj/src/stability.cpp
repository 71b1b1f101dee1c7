#include "lpstab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <random>
#include <thread>

#include "lpstab/constants.hpp"

namespace lpstab {

namespace {

double sq(double x) { return x * x; }

StabilityReport make_row(const BodyContext& ctx, std::string check, double p, double lhs,
                         double rhs, double tol) {
  StabilityReport r;
  r.check = std::move(check);
  r.body = ctx.id();
  r.n = ctx.dim();
  r.p = p;
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.pass = r.margin >= -tol * std::max(1.0, std::abs(rhs));
  return r;
}

StabilityReport error_row(const std::string& body, int n, std::string check, double p,
                          std::string what) {
  StabilityReport r;
  r.check = std::move(check);
  r.body = body;
  r.n = n;
  r.p = p;
  r.pass = true;  // recorded, not counted as a violation
  r.error = std::move(what);
  return r;
}

// delta_2 between K - e and the origin-centred ball of radius r
double delta2_to_shifted_ball(const ConvexBody& K, const Vec& e, double r) {
  const auto& g = *K.grid();
  double s = 0;
  for (int k = 0; k < g.node_count(); ++k) {
    double d = K.support_values()[k] - dot(e, g.nodes()[k]) - r;
    s += g.weights()[k] * d * d;
  }
  return std::sqrt(s / sphere_surface(K.dim()));
}

// omega_n (integral of h^{-q}) ^{-1/q} style radius from the normalized body
double deficit_radius(const ConvexBody& Kt, const Vec& about, int power) {
  const auto& g = *Kt.grid();
  double s = 0;
  for (int k = 0; k < g.node_count(); ++k) {
    double h = Kt.support_values()[k] - dot(about, g.nodes()[k]);
    s += g.weights()[k] * std::pow(h, -power);
  }
  return std::pow(sphere_surface(Kt.dim()) / s, 1.0 / power);
}

double mean_width_ratio(const ConvexBody& Kt) {
  const auto& g = *Kt.grid();
  double s = 0;
  for (int k = 0; k < g.node_count(); ++k) s += g.weights()[k] * Kt.support_values()[k];
  return s / sphere_surface(Kt.dim());
}

double field_l2_norm(const ScalarField& f) {
  const auto& g = *f.grid;
  double s = 0;
  for (int k = 0; k < g.node_count(); ++k) s += g.weights()[k] * f.values[k] * f.values[k];
  return std::sqrt(s);
}

}  // namespace

BodyContext::BodyContext(std::string id, ConvexBody body)
    : id_(std::move(id)), body_(std::move(body)), normalized_(normalize_volume(body_)) {
  symmetric_ = body_.origin_symmetric();
}

BodyContext BodyContext::from_spec(const BodySpec& spec) {
  return BodyContext(spec.name(), make_body(spec));
}

const Vec& BodyContext::santalo() const {
  if (!have_santalo_) {
    santalo_ = symmetric_ ? Vec{} : santalo_point(normalized_).point;
    have_santalo_ = true;
  }
  return santalo_;
}

double BodyContext::diam() const {
  if (diam_ < 0) diam_ = diameter(normalized_);
  return diam_;
}

const WidthResult& BodyContext::width(double p) const {
  auto it = widths_.find(p);
  if (it == widths_.end()) it = widths_.emplace(p, width_E_p(normalized_, p)).first;
  return it->second;
}

const LpCurvatureSummary& BodyContext::curvature_ratio(double p) const {
  auto it = ratios_.find(p);
  if (it == ratios_.end()) it = ratios_.emplace(p, lp_curvature(normalized_, p).summary).first;
  return it->second;
}

const CentroAffineResult& BodyContext::centro_affine() const {
  if (!centro_) centro_ = std::make_unique<CentroAffineResult>(centro_affine_curvature(normalized_));
  return *centro_;
}

double BodyContext::asymmetry() const {
  if (asymmetry_ < 0) asymmetry_ = relative_asymmetry_to_ball(normalized_).value;
  return asymmetry_;
}

std::vector<StabilityReport> check_entropy_santalo_gap(const BodyContext& ctx, double p,
                                                       double tol) {
  const int n = ctx.dim();
  if (p < -double(n) || p >= 0)
    return {error_row(ctx.id(), n, "entropy_santalo_gap", p, "p outside [-n, 0)")};
  const WidthResult& w = ctx.width(p);
  const Vec& s = ctx.santalo();
  double gap = sq(norm(w.point - s));
  double c0 = entropy_gap_constant(n, p);
  double rhs = c0 * (1.0 - w.value) * std::pow(ctx.diam(), 2.0 - p);
  StabilityReport r = make_row(ctx, "entropy_santalo_gap", p, gap, rhs, tol);
  r.aux = {{"c0", c0},
           {"E_p", w.value},
           {"D", ctx.diam()},
           {"ep_dist", norm(w.point - s)},
           {"solver_converged", w.converged ? 1.0 : 0.0}};
  return {r};
}

std::vector<StabilityReport> check_width_upper(const BodyContext& ctx, double p, double tol) {
  const int n = ctx.dim();
  if (p < 1.0) return {error_row(ctx.id(), n, "width_upper", p, "needs p >= 1")};
  const WidthResult& w = ctx.width(p);
  const LpCurvatureSummary& rp = ctx.curvature_ratio(p);

  StabilityReport a = make_row(ctx, "width_upper:ratio", p, w.value, rp.ratio, tol);
  a.aux = {{"R_p", rp.ratio}, {"E_p", w.value}};
  StabilityReport b =
      make_row(ctx, "width_upper:mean", p, mean_width_ratio(ctx.normalized()),
               std::pow(w.value, 1.0 / p), tol);
  return {a, b};
}

std::vector<StabilityReport> check_width_negp(const BodyContext& ctx, double p, double tol) {
  const int n = ctx.dim();
  if (p <= -double(n) || p >= 0)
    return {error_row(ctx.id(), n, "width_negp", p, "needs p in (-n, 0)")};
  const WidthResult& w = ctx.width(p);
  double eps = 1.0 - w.value;
  if (eps >= 1.0)
    return {error_row(ctx.id(), n, "width_negp", p, "anomalous width deficit eps >= 1")};
  eps = std::max(eps, 0.0);

  const ConvexBody& Kt = ctx.normalized();
  double r = deficit_radius(Kt, ctx.santalo(), n);
  double D = ctx.diam();
  double c0 = entropy_gap_constant(n, p);
  double c1 = width_deficit_constant(n, p);

  std::vector<StabilityReport> rows;
  rows.push_back(make_row(ctx, "width_negp:radius_lower", p, 1.0, r, tol));
  rows.push_back(make_row(ctx, "width_negp:radius_upper", p, r, std::pow(1.0 - eps, 1.0 / p), tol));

  double deff = ctx.symmetric() ? 0.5 * D : D;
  double rhs = std::sqrt(2.0 * c1 * std::pow(deff + r, n + 1.0) * eps);
  if (!ctx.symmetric()) rhs += std::sqrt(c0 * std::pow(D, 2.0 - p) * eps);
  double lhs = delta2_to_shifted_ball(Kt, w.point, r);
  StabilityReport d = make_row(ctx, "width_negp:delta2", p, lhs, rhs, tol);
  d.aux = {{"eps", eps}, {"r", r}, {"c0", c0}, {"c1", c1}, {"D", D},
           {"symmetric", ctx.symmetric() ? 1.0 : 0.0}};
  rows.push_back(d);
  return rows;
}

std::vector<StabilityReport> check_harmonic_width(const BodyContext& ctx, double tol) {
  const int n = ctx.dim();
  if (!ctx.symmetric())
    return {error_row(ctx.id(), n, "harmonic_width", -1.0, "body not origin-symmetric")};
  double eps = std::max(0.0, 1.0 - ctx.width(-1.0).value);
  if (eps >= 1.0)
    return {error_row(ctx.id(), n, "harmonic_width", -1.0, "anomalous width deficit eps >= 1")};

  const ConvexBody& Kt = ctx.normalized();
  double r = deficit_radius(Kt, Vec{}, 2);
  double D = ctx.diam();

  std::vector<StabilityReport> rows;
  rows.push_back(make_row(ctx, "harmonic_width:radius_lower", -1.0, 1.0, r, tol));
  rows.push_back(make_row(ctx, "harmonic_width:radius_upper", -1.0, r, 1.0 / (1.0 - eps), tol));
  StabilityReport d = make_row(ctx, "harmonic_width:delta2", -1.0,
                               delta2_to_shifted_ball(Kt, Vec{}, r), D * std::sqrt(eps), tol);
  d.aux = {{"eps", eps}, {"r", r}, {"D", D}};
  rows.push_back(d);
  rows.push_back(make_row(ctx, "harmonic_width:diameter", -1.0, std::cbrt(0.5 * D),
                          diameter_chain_constant(n) / (1.0 - eps), tol));
  return rows;
}

std::vector<StabilityReport> check_symmetric_stability(const BodyContext& ctx, double p,
                                                       double tol) {
  const int n = ctx.dim();
  if (!ctx.symmetric())
    return {error_row(ctx.id(), n, "sym_stability", p, "body not origin-symmetric")};
  if (p < 0.0 || p >= 1.0)
    return {error_row(ctx.id(), n, "sym_stability", p, "needs p in [0, 1)")};

  const ConvexBody& Kt = ctx.normalized();
  const LpCurvatureSummary& rp = ctx.curvature_ratio(p);
  double r = deficit_radius(Kt, Vec{}, 2);
  double D = ctx.diam();

  std::vector<StabilityReport> rows;
  rows.push_back(make_row(ctx, "sym_stability:radius_lower", p, 1.0, r, tol));
  rows.push_back(make_row(ctx, "sym_stability:radius_upper", p, r, rp.ratio, tol));

  StabilityReport d =
      make_row(ctx, "sym_stability:delta2", p, delta2_to_shifted_ball(Kt, Vec{}, r),
               D * std::sqrt(std::max(0.0, 1.0 - 1.0 / rp.ratio)), tol);
  d.aux = {{"r", r}, {"R_p", rp.ratio}, {"D", D}};
  rows.push_back(d);

  rows.push_back(make_row(ctx, "sym_stability:diameter", p, D,
                          2.0 * std::pow(diameter_chain_constant(n) * rp.ratio, 3.0), tol));
  rows.push_back(
      make_row(ctx, "sym_stability:einv_chain", p, 1.0 / rp.ratio, ctx.width(-1.0).value, tol));
  return rows;
}

std::vector<StabilityReport> check_polarization_identity(const BodyContext& ctx, double tol) {
  const ConvexBody& K = ctx.body();
  const auto& g = *K.grid();
  const double omega = sphere_surface(K.dim());
  double i1 = 0, i2 = 0;
  for (int k = 0; k < g.node_count(); ++k) {
    double h = K.support_values()[k];
    i1 += g.weights()[k] / h;
    i2 += g.weights()[k] / (h * h);
  }
  double lhs = i1 / (std::sqrt(i2) * std::sqrt(omega));
  double nrm = 0;
  for (int k = 0; k < g.node_count(); ++k) {
    double d = 1.0 / (K.support_values()[k] * std::sqrt(i2)) - 1.0 / std::sqrt(omega);
    nrm += g.weights()[k] * d * d;
  }
  double rhs = 1.0 - 0.5 * nrm;

  StabilityReport r;
  r.check = "polarization_identity";
  r.body = ctx.id();
  r.n = K.dim();
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.pass = std::abs(r.margin) <= tol;
  return {r};
}

std::vector<StabilityReport> check_planar_affine(const BodyContext& ctx, double tol) {
  if (ctx.dim() != 2)
    return {error_row(ctx.id(), ctx.dim(), "planar_affine", 0.0, "check is planar only")};
  std::vector<StabilityReport> rows;
  const CentroAffineResult& ca = ctx.centro_affine();

  if (ctx.symmetric()) {
    DistanceResult bm = banach_mazur_to_ball(ctx.normalized());
    StabilityReport r =
        make_row(ctx, "planar_affine:dbm", -2.0, bm.value, std::sqrt(ca.ratio), tol);
    r.aux = {{"R_minus2", ca.ratio}, {"dbm_converged", bm.converged ? 1.0 : 0.0}};
    rows.push_back(r);
  }

  // (V/pi)^2 H takes the value 1 somewhere, so min <= 1 <= max; on the
  // normalized body V = pi exactly
  double scale = sq(volume(ctx.normalized()) / kPi);
  rows.push_back(make_row(ctx, "planar_affine:bracket_min", 0.0, scale * ca.min, 1.0, tol));
  StabilityReport mx = make_row(ctx, "planar_affine:bracket_max", 0.0, 1.0, scale * ca.max,
                                2.0 * tol);
  rows.push_back(mx);
  return rows;
}

std::vector<StabilityReport> check_sln_invariance(const BodyContext& ctx, const Mat3& map,
                                                  double rel_tol) {
  const CentroAffineResult& ca = ctx.centro_affine();
  std::vector<StabilityReport> rows;
  try {
    ConvexBody img = linear_image(ctx.normalized(), map);
    CentroAffineResult ca2 = centro_affine_curvature(img);
    double lo_err = std::abs(ca2.min - ca.min) / ca.min;
    double hi_err = std::abs(ca2.max - ca.max) / ca.max;
    bool refined = false;
    if (std::max(lo_err, hi_err) > 0.5 * rel_tol) {
      // the pullback spreads spectral content past the band limit; resolve
      // the image on a doubled grid before judging the invariance
      ConvexBody img2 = linear_image(ctx.normalized().on_grid(ctx.body().grid()->refined(2)), map);
      CentroAffineResult ca3 = centro_affine_curvature(img2);
      lo_err = std::abs(ca3.min - ca.min) / ca.min;
      hi_err = std::abs(ca3.max - ca.max) / ca.max;
      refined = true;
    }
    StabilityReport lo = make_row(ctx, "sln_invariance:min", 0.0, lo_err, rel_tol, 0.0);
    lo.pass = lo.lhs <= rel_tol;
    StabilityReport hi = make_row(ctx, "sln_invariance:max", 0.0, hi_err, rel_tol, 0.0);
    hi.pass = hi.lhs <= rel_tol;
    if (refined) {
      lo.aux.push_back({"band_limit_doubled", 1.0});
      hi.aux.push_back({"band_limit_doubled", 1.0});
    }
    rows.push_back(lo);
    rows.push_back(hi);
  } catch (const BodyError& e) {
    rows.push_back(error_row(ctx.id(), ctx.dim(), "sln_invariance", 0.0,
                             std::string("skipped: ") + e.what()));
  }
  return rows;
}

std::vector<StabilityReport> check_gradient_stationarity(const BodyContext& ctx, double p) {
  std::vector<StabilityReport> rows;
  // hypothesis point: entropy point at the origin for the width field,
  // Santalo point at the origin for the volume-product field
  const WidthResult& w = ctx.width(p);
  ConvexBody Kw = norm(w.point) > 1e-13 ? translate(ctx.normalized(), w.point) : ctx.normalized();
  double width_norm = field_l2_norm(grad_width_field(Kw, p));

  const Vec& s = ctx.santalo();
  ConvexBody Ks = norm(s) > 1e-13 ? translate(ctx.normalized(), s) : ctx.normalized();
  double vp_norm = field_l2_norm(grad_volume_product_field(Ks));

  StabilityReport r;
  r.check = "trend:gradient_norms";
  r.body = ctx.id();
  r.n = ctx.dim();
  r.p = p;
  r.lhs = width_norm;
  r.rhs = vp_norm;
  r.aux = {{"width_grad_l2", width_norm}, {"volprod_grad_l2", vp_norm}};
  rows.push_back(r);
  return rows;
}

Mat3 seeded_unimodular(int dim, unsigned seed) {
  std::mt19937_64 rng(seed);
  auto uni = [&]() { return 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0; };
  for (;;) {
    Mat3 a = Mat3::identity();
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) a(i, j) += 0.25 * uni();
    double d = a.det();
    if (std::abs(d) < 0.3) continue;  // keep the map well conditioned
    double s = (d > 0 ? 1.0 : -1.0) * std::pow(std::abs(d), -1.0 / dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) a(i, j) *= s;
    if (std::abs(a.det() - 1.0) > 1e-12) continue;
    return a;
  }
}

SuiteConfig SuiteConfig::defaults(int dim) {
  SuiteConfig c;
  c.dim = dim;
  c.p_entropy_gap = {-double(dim) + 0.1, -1.5, -1.0, -0.5, -0.1};
  c.p_negative = dim == 2 ? std::vector<double>{-1.5, -1.0, -0.5} : std::vector<double>{-2.0, -1.0};
  c.sln_rel_tol = dim == 2 ? 1e-5 : 1e-4;
  return c;
}

namespace {

std::vector<StabilityReport> run_body(const BodySpec& spec, int body_index,
                                      const SuiteConfig& cfg) {
  std::vector<StabilityReport> rows;
  std::unique_ptr<BodyContext> ctx;
  try {
    ctx = std::make_unique<BodyContext>(BodyContext::from_spec(spec));
  } catch (const std::exception& e) {
    rows.push_back(error_row(spec.name(), spec.dimension, "generator", 0.0, e.what()));
    return rows;
  }
  auto append = [&](std::vector<StabilityReport> more) {
    for (auto& r : more) rows.push_back(std::move(r));
  };

  append(check_polarization_identity(*ctx));
  for (double p : cfg.p_entropy_gap) append(check_entropy_santalo_gap(*ctx, p, cfg.tol));
  for (double p : cfg.p_upper) {
    append(check_width_upper(*ctx, p, cfg.tol));
    if (cfg.asymmetry_trend) {
      StabilityReport t;
      t.check = "trend:asymmetry_vs_ratio";
      t.body = ctx->id();
      t.n = ctx->dim();
      t.p = p;
      t.lhs = ctx->asymmetry();
      t.rhs = std::pow(ctx->curvature_ratio(p).ratio, 1.0 / p) - 1.0;
      t.aux = {{"A", t.lhs}, {"ratio_root_minus_1", t.rhs}};
      if (t.rhs > 1e-14) t.aux.push_back({"A_sq_over_gap", t.lhs * t.lhs / t.rhs});
      rows.push_back(t);
    }
  }
  for (double p : cfg.p_negative) append(check_width_negp(*ctx, p, cfg.tol));
  if (ctx->symmetric()) {
    append(check_harmonic_width(*ctx, cfg.tol));
    for (double p : cfg.p_subunit) append(check_symmetric_stability(*ctx, p, cfg.tol));
    if (spec.family == "cap_cut") {
      double eps = std::max(0.0, 1.0 - ctx->width(-1.0).value);
      double r = deficit_radius(ctx->normalized(), Vec{}, 2);
      StabilityReport t;
      t.check = "trend:capcut_delta2_rate";
      t.body = ctx->id();
      t.n = ctx->dim();
      t.p = -1.0;
      t.lhs = delta2_to_shifted_ball(ctx->normalized(), Vec{}, r);
      t.rhs = eps;
      if (eps > 0) t.aux = {{"delta2_over_eps", t.lhs / eps}, {"cap_height", spec.eps}};
      rows.push_back(t);
    }
  }
  if (ctx->dim() == 2) append(check_planar_affine(*ctx, cfg.tol));
  if (ctx->dim() == 3) {
    const CentroAffineResult& ca = ctx->centro_affine();
    StabilityReport t;
    t.check = "trend:centroaffine_bracket_3d";
    t.body = ctx->id();
    t.n = 3;
    double scale = sq(volume(ctx->normalized()) / unit_ball_volume(3));
    t.lhs = scale * ca.min;
    t.rhs = scale * ca.max;
    t.aux = {{"normalized_min", t.lhs}, {"normalized_max", t.rhs}};
    rows.push_back(t);
  }
  for (int j = 0; j < cfg.sln_maps; ++j) {
    Mat3 map = seeded_unimodular(ctx->dim(),
                                 cfg.map_seed * 1000003u + 131u * body_index + 7919u * j);
    auto sub = check_sln_invariance(*ctx, map, cfg.sln_rel_tol);
    for (auto& r : sub) r.aux.push_back({"map_index", double(j)});
    append(std::move(sub));
  }
  // stationarity data: pass/fail only at the critical families
  if (spec.family == "ball") {
    append(check_gradient_stationarity(*ctx, -1.0));
    double wn = rows.back().lhs, vn = rows.back().rhs;
    rows.push_back(make_row(*ctx, "gradient:width_ball", -1.0, wn, 1e-8, 0.0));
    rows.back().pass = wn <= 1e-8;
    rows.push_back(make_row(*ctx, "gradient:volprod_ball", -1.0, vn, 1e-8, 0.0));
    rows.back().pass = vn <= 1e-8;
  } else if (spec.family == "ellipsoid") {
    append(check_gradient_stationarity(*ctx, -1.0));
    double vn = rows.back().rhs;
    rows.push_back(make_row(*ctx, "gradient:volprod_ellipsoid", -1.0, vn, 1e-6, 0.0));
    rows.back().pass = vn <= 1e-6;
  } else {
    append(check_gradient_stationarity(*ctx, -1.0));
  }
  return rows;
}

}  // namespace

std::vector<StabilityReport> run_suite(const std::vector<BodySpec>& specs,
                                       const SuiteConfig& cfg) {
  int threads = cfg.threads > 0 ? cfg.threads
                                : int(std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::vector<StabilityReport>> results(specs.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= specs.size()) return;
      results[i] = run_body(specs[i], int(i), cfg);
    }
  };
  if (threads <= 1 || specs.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<int>(threads, int(specs.size())); ++t)
      pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<StabilityReport> out;
  for (auto& rows : results)
    for (auto& r : rows) out.push_back(std::move(r));
  return out;
}

bool suite_passes(const std::vector<StabilityReport>& reports) {
  for (const auto& r : reports)
    if (!r.trend() && r.error.empty() && !r.pass) return false;
  return true;
}

}  // namespace lpstab
