#include "lpstab/sphere_grid.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_legendre.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "lpstab/constants.hpp"

namespace lpstab {

namespace {

// Pole clamp for chart-frame evaluation. The orthonormal-frame Hessian
// entries divide by sin^2(theta); below this colatitude the cancellation
// noise would exceed the position error of evaluating at the clamp.
constexpr double kMinSinTheta = 1e-4;

struct GslInit {
  GslInit() { gsl_set_error_handler_off(); }
};
const GslInit gsl_init_once{};

int tri_index(int l, int m) { return static_cast<int>(gsl_sf_legendre_array_index(l, m)); }

// Legendre P_n and derivative in long double; gsl_integration_glfixed
// weights are only ~1e-12 accurate at moderate order, so weights are
// recomputed from the (machine-accurate) nodes.
void legendre_pd(int n, long double x, long double& p, long double& dp) {
  long double p0 = 1, p1 = x;
  for (int k = 2; k <= n; ++k) {
    long double pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1);
}

void angles_of(const Vec& u, double& theta, double& phi) {
  double s = std::hypot(u[0], u[1]);
  theta = std::atan2(s, u[2]);
  phi = (s > 0) ? std::atan2(u[1], u[0]) : 0.0;
  double lo = kMinSinTheta, hi = kPi - kMinSinTheta;
  theta = std::min(std::max(theta, lo), hi);
}

void check_unit(const Vec& u) {
  if (std::abs(norm(u) - 1.0) > 1e-12) throw GridError("direction is not unit length");
}

}  // namespace

Spectrum Spectrum::truncated(int new_degree) const {
  Spectrum out = Spectrum::zero(dim, new_degree);
  int shared = std::min(degree, new_degree);
  if (dim == 2) {
    for (int i = 0; i < 1 + 2 * shared; ++i) out.c[i] = c[i];
  } else {
    for (int i = 0; i < (shared + 1) * (shared + 1); ++i) out.c[i] = c[i];
  }
  return out;
}

bool Spectrum::origin_symmetric(double tol) const {
  if (dim == 2) {
    for (int k = 1; k <= degree; k += 2)
      if (std::abs(c[2 * k - 1]) > tol || std::abs(c[2 * k]) > tol) return false;
    return true;
  }
  for (int l = 1; l <= degree; l += 2)
    for (int m = -l; m <= l; ++m)
      if (std::abs(c[sph_index(l, m)]) > tol) return false;
  return true;
}

std::shared_ptr<const SphereGrid> SphereGrid::circle(int node_count) {
  if (node_count < 16) throw GridError("resolution below minimum (need N >= 16)");
  if (node_count % 2 != 0) throw GridError("node count must be even for antipodal closure");
  auto g = std::shared_ptr<SphereGrid>(new SphereGrid());
  g->dim_ = 2;
  g->n_nodes_ = node_count;
  g->max_degree_ = node_count / 2 - 1;
  g->nodes_.reserve(node_count);
  g->weights_.assign(node_count, 2.0 * kPi / node_count);
  for (int j = 0; j < node_count; ++j)
    g->nodes_.push_back(direction2(2.0 * kPi * j / node_count));
  return g;
}

std::shared_ptr<const SphereGrid> SphereGrid::sphere(int gauss_order, int longitudes) {
  if (gauss_order < 8) throw GridError("resolution below minimum (need L >= 8)");
  if (longitudes < 2 * gauss_order) throw GridError("resolution below minimum (need M >= 2L)");
  if (longitudes % 2 != 0) throw GridError("longitude count must be even for antipodal closure");
  auto g = std::shared_ptr<SphereGrid>(new SphereGrid());
  g->dim_ = 3;
  g->gauss_order_ = gauss_order;
  g->longitudes_ = longitudes;
  g->max_degree_ = std::min(gauss_order - 1, (longitudes - 1) / 2);
  g->build_sphere_tables();
  return g;
}

void SphereGrid::build_sphere_tables() {
  const int L = gauss_order_, M = longitudes_;
  gsl_integration_glfixed_table* tbl = gsl_integration_glfixed_table_alloc(L);
  theta_.resize(L);
  sin_theta_.resize(L);
  cos_theta_.resize(L);
  gl_weight_.resize(L);
  for (int i = 0; i < L; ++i) {
    double x, w;
    gsl_integration_glfixed_point(-1.0, 1.0, i, &x, &w, tbl);
    long double xr = x, p, dp;
    for (int it = 0; it < 2; ++it) {
      legendre_pd(L, xr, p, dp);
      xr -= p / dp;
    }
    legendre_pd(L, xr, p, dp);
    cos_theta_[i] = static_cast<double>(xr);
    theta_[i] = std::acos(cos_theta_[i]);
    sin_theta_[i] = std::sin(theta_[i]);
    gl_weight_[i] = static_cast<double>(2.0L / ((1 - xr * xr) * dp * dp));
  }
  gsl_integration_glfixed_table_free(tbl);

  tri_count_ = static_cast<int>(gsl_sf_legendre_array_n(max_degree_));
  leg_.resize(static_cast<size_t>(L) * tri_count_);
  dleg_.resize(leg_.size());
  d2leg_.resize(leg_.size());
  for (int i = 0; i < L; ++i) {
    gsl_sf_legendre_deriv2_alt_array_e(GSL_SF_LEGENDRE_SPHARM, max_degree_, cos_theta_[i], 1.0,
                                       &leg_[static_cast<size_t>(i) * tri_count_],
                                       &dleg_[static_cast<size_t>(i) * tri_count_],
                                       &d2leg_[static_cast<size_t>(i) * tri_count_]);
  }

  cos_m_.resize(static_cast<size_t>(M) * (max_degree_ + 1));
  sin_m_.resize(cos_m_.size());
  for (int j = 0; j < M; ++j) {
    double phi = 2.0 * kPi * j / M;
    for (int m = 0; m <= max_degree_; ++m) {
      cos_m_[static_cast<size_t>(j) * (max_degree_ + 1) + m] = std::cos(m * phi);
      sin_m_[static_cast<size_t>(j) * (max_degree_ + 1) + m] = std::sin(m * phi);
    }
  }

  nodes_.reserve(static_cast<size_t>(L) * M);
  weights_.reserve(nodes_.capacity());
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < M; ++j) {
      nodes_.push_back(direction3(theta_[i], 2.0 * kPi * j / M));
      weights_.push_back(gl_weight_[i] * 2.0 * kPi / M);
    }
}

std::shared_ptr<const SphereGrid> SphereGrid::make(int dim, std::vector<int> resolution) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, std::shared_ptr<const SphereGrid>> cache;
  int r0 = resolution.empty() ? 0 : resolution[0];
  int r1 = resolution.size() > 1 ? resolution[1] : 0;
  {
    std::scoped_lock lock(mu);
    auto it = cache.find({dim, r0, r1});
    if (it != cache.end()) return it->second;
  }
  std::shared_ptr<const SphereGrid> g;
  if (dim == 2)
    g = circle(r0);
  else if (dim == 3)
    g = sphere(r0, r1);
  else
    throw GridError("unsupported dimension (need n = 2 or 3)");
  std::scoped_lock lock(mu);
  cache.insert({{dim, r0, r1}, g});
  return g;
}

std::vector<int> SphereGrid::resolution() const {
  return dim_ == 2 ? std::vector<int>{n_nodes_} : std::vector<int>{gauss_order_, longitudes_};
}

std::string SphereGrid::resolution_label() const {
  return dim_ == 2 ? "N=" + std::to_string(n_nodes_)
                   : "L=" + std::to_string(gauss_order_) + ",M=" + std::to_string(longitudes_);
}

std::shared_ptr<const SphereGrid> SphereGrid::refined(int factor) const {
  if (dim_ == 2) return make(2, {n_nodes_ * factor});
  return make(3, {gauss_order_ * factor, longitudes_ * factor});
}

int SphereGrid::antipode_index(int k) const {
  if (dim_ == 2) return (k + n_nodes_ / 2) % n_nodes_;
  int i = k / longitudes_, j = k % longitudes_;
  return (gauss_order_ - 1 - i) * longitudes_ + (j + longitudes_ / 2) % longitudes_;
}

double SphereGrid::integrate(std::span<const double> values) const {
  if (static_cast<int>(values.size()) != node_count())
    throw GridError("field/grid size mismatch");
  double s = 0;
  for (int k = 0; k < node_count(); ++k) s += weights_[k] * values[k];
  return s;
}

Spectrum SphereGrid::analyze(std::span<const double> values, int degree) const {
  if (static_cast<int>(values.size()) != node_count())
    throw GridError("field/grid size mismatch");
  if (degree < 0) degree = max_degree_;
  if (degree > max_degree_) throw GridError("degree exceeds grid band limit");
  Spectrum s = Spectrum::zero(dim_, degree);

  if (dim_ == 2) {
    const int N = n_nodes_;
    for (int j = 0; j < N; ++j) s.c[0] += values[j] / N;
    for (int j = 0; j < N; ++j) {
      double t = 2.0 * kPi * j / N;
      double c1 = std::cos(t), s1 = std::sin(t);
      double ck = 1.0, sk = 0.0;  // cos(k t), sin(k t), k starts at 0
      for (int k = 1; k <= degree; ++k) {
        double cn = ck * c1 - sk * s1;
        double sn = sk * c1 + ck * s1;
        ck = cn;
        sk = sn;
        s.c[2 * k - 1] += 2.0 * values[j] * ck / N;
        s.c[2 * k] += 2.0 * values[j] * sk / N;
      }
    }
    return s;
  }

  const int L = gauss_order_, M = longitudes_, D = max_degree_;
  std::vector<double> fc(D + 1), fs(D + 1);
  for (int i = 0; i < L; ++i) {
    std::fill(fc.begin(), fc.end(), 0.0);
    std::fill(fs.begin(), fs.end(), 0.0);
    const double* row = values.data() + static_cast<size_t>(i) * M;
    for (int j = 0; j < M; ++j) {
      const double* cm = &cos_m_[static_cast<size_t>(j) * (D + 1)];
      const double* sm = &sin_m_[static_cast<size_t>(j) * (D + 1)];
      double v = row[j];
      for (int m = 0; m <= degree; ++m) {
        fc[m] += v * cm[m];
        fs[m] += v * sm[m];
      }
    }
    const double* P = &leg_[static_cast<size_t>(i) * tri_count_];
    double wrow = gl_weight_[i] * 2.0 * kPi / M;
    for (int m = 0; m <= degree; ++m) {
      double nrm = (m == 0) ? 1.0 : std::sqrt(2.0);
      for (int l = m; l <= degree; ++l) {
        double base = wrow * nrm * P[tri_index(l, m)];
        s.c[Spectrum::sph_index(l, m)] += base * fc[m];
        if (m > 0) s.c[Spectrum::sph_index(l, -m)] += base * fs[m];
      }
    }
  }
  return s;
}

std::vector<double> SphereGrid::synthesize(const Spectrum& s) const {
  if (s.dim != dim_) throw GridError("spectrum/grid dimension mismatch");
  if (s.degree > max_degree_) throw GridError("degree exceeds grid band limit");
  std::vector<double> out(node_count(), 0.0);

  if (dim_ == 2) {
    const int N = n_nodes_;
    for (int j = 0; j < N; ++j) {
      double t = 2.0 * kPi * j / N;
      double c1 = std::cos(t), s1 = std::sin(t);
      double ck = 1.0, sk = 0.0;
      double v = s.c[0];
      for (int k = 1; k <= s.degree; ++k) {
        double cn = ck * c1 - sk * s1;
        double sn = sk * c1 + ck * s1;
        ck = cn;
        sk = sn;
        v += s.c[2 * k - 1] * ck + s.c[2 * k] * sk;
      }
      out[j] = v;
    }
    return out;
  }

  const int L = gauss_order_, M = longitudes_, D = max_degree_;
  std::vector<double> am(D + 1), bm(D + 1);
  for (int i = 0; i < L; ++i) {
    std::fill(am.begin(), am.end(), 0.0);
    std::fill(bm.begin(), bm.end(), 0.0);
    const double* P = &leg_[static_cast<size_t>(i) * tri_count_];
    for (int m = 0; m <= s.degree; ++m) {
      double nrm = (m == 0) ? 1.0 : std::sqrt(2.0);
      double a = 0, b = 0;
      for (int l = m; l <= s.degree; ++l) {
        double p = P[tri_index(l, m)];
        a += s.c[Spectrum::sph_index(l, m)] * p;
        if (m > 0) b += s.c[Spectrum::sph_index(l, -m)] * p;
      }
      am[m] = nrm * a;
      bm[m] = nrm * b;
    }
    double* row = out.data() + static_cast<size_t>(i) * M;
    for (int j = 0; j < M; ++j) {
      const double* cm = &cos_m_[static_cast<size_t>(j) * (D + 1)];
      const double* sm = &sin_m_[static_cast<size_t>(j) * (D + 1)];
      double v = 0;
      for (int m = 0; m <= s.degree; ++m) v += am[m] * cm[m] + bm[m] * sm[m];
      row[j] = v;
    }
  }
  return out;
}

FieldJets SphereGrid::synthesize_jets(const Spectrum& s) const {
  if (s.dim != dim_) throw GridError("spectrum/grid dimension mismatch");
  if (s.degree > max_degree_) throw GridError("degree exceeds grid band limit");
  const int n = node_count();
  FieldJets jets;
  jets.value.assign(n, 0.0);
  jets.g1.assign(n, 0.0);
  jets.g2.assign(n, 0.0);
  jets.h11.assign(n, 0.0);
  jets.h12.assign(n, 0.0);
  jets.h22.assign(n, 0.0);

  if (dim_ == 2) {
    const int N = n_nodes_;
    for (int j = 0; j < N; ++j) {
      double t = 2.0 * kPi * j / N;
      double c1 = std::cos(t), s1 = std::sin(t);
      double ck = 1.0, sk = 0.0;
      double v = s.c[0], d1 = 0.0, d2 = 0.0;
      for (int k = 1; k <= s.degree; ++k) {
        double cn = ck * c1 - sk * s1;
        double sn = sk * c1 + ck * s1;
        ck = cn;
        sk = sn;
        double a = s.c[2 * k - 1], b = s.c[2 * k];
        v += a * ck + b * sk;
        d1 += k * (b * ck - a * sk);
        d2 -= k * k * (a * ck + b * sk);
      }
      jets.value[j] = v;
      jets.g1[j] = d1;
      jets.h11[j] = d2;
    }
    return jets;
  }

  const int L = gauss_order_, M = longitudes_, D = max_degree_;
  // (theta, phi) partials of each azimuthal profile, then chart assembly
  std::vector<double> aP(D + 1), bP(D + 1), aD(D + 1), bD(D + 1), aD2(D + 1), bD2(D + 1);
  for (int i = 0; i < L; ++i) {
    std::fill(aP.begin(), aP.end(), 0.0);
    std::fill(bP.begin(), bP.end(), 0.0);
    std::fill(aD.begin(), aD.end(), 0.0);
    std::fill(bD.begin(), bD.end(), 0.0);
    std::fill(aD2.begin(), aD2.end(), 0.0);
    std::fill(bD2.begin(), bD2.end(), 0.0);
    const size_t off = static_cast<size_t>(i) * tri_count_;
    for (int m = 0; m <= s.degree; ++m) {
      double nrm = (m == 0) ? 1.0 : std::sqrt(2.0);
      double ap = 0, bp = 0, ad = 0, bd = 0, ad2 = 0, bd2 = 0;
      for (int l = m; l <= s.degree; ++l) {
        int t = tri_index(l, m);
        double cc = s.c[Spectrum::sph_index(l, m)];
        double cs = (m > 0) ? s.c[Spectrum::sph_index(l, -m)] : 0.0;
        ap += cc * leg_[off + t];
        ad += cc * dleg_[off + t];
        ad2 += cc * d2leg_[off + t];
        if (m > 0) {
          bp += cs * leg_[off + t];
          bd += cs * dleg_[off + t];
          bd2 += cs * d2leg_[off + t];
        }
      }
      aP[m] = nrm * ap;
      bP[m] = nrm * bp;
      aD[m] = nrm * ad;
      bD[m] = nrm * bd;
      aD2[m] = nrm * ad2;
      bD2[m] = nrm * bd2;
    }
    double st = sin_theta_[i], ct = cos_theta_[i];
    double cot = ct / st;
    for (int j = 0; j < M; ++j) {
      const double* cm = &cos_m_[static_cast<size_t>(j) * (D + 1)];
      const double* sm = &sin_m_[static_cast<size_t>(j) * (D + 1)];
      double h = 0, ht = 0, htt = 0, hp = 0, htp = 0, hpp = 0;
      for (int m = 0; m <= s.degree; ++m) {
        double ce = cm[m], se = sm[m];
        h += aP[m] * ce + bP[m] * se;
        ht += aD[m] * ce + bD[m] * se;
        htt += aD2[m] * ce + bD2[m] * se;
        double sw = bP[m] * ce - aP[m] * se;  // d/dphi of the P profile
        hp += m * sw;
        htp += m * (bD[m] * ce - aD[m] * se);
        hpp -= m * m * (aP[m] * ce + bP[m] * se);
      }
      int k = i * M + j;
      jets.value[k] = h;
      jets.g1[k] = ht;
      jets.g2[k] = hp / st;
      jets.h11[k] = htt;
      jets.h12[k] = htp / st - cot * (hp / st);
      jets.h22[k] = hpp / (st * st) + cot * ht;
    }
  }
  return jets;
}

ScalarField make_field(std::shared_ptr<const SphereGrid> grid, std::vector<double> values) {
  if (static_cast<int>(values.size()) != grid->node_count())
    throw GridError("field/grid size mismatch");
  return {std::move(grid), std::move(values), std::nullopt};
}

ScalarField synthesize_field(std::shared_ptr<const SphereGrid> grid, const Spectrum& s) {
  ScalarField f;
  f.values = grid->synthesize(s);
  f.grid = std::move(grid);
  f.spectrum = s;
  return f;
}

double integrate(const ScalarField& f) { return f.grid->integrate(f.values); }

Spectrum analyze(const ScalarField& f) { return f.grid->analyze(f.values); }

HessianField covariant_hessian(const ScalarField& f) {
  if (!f.spectrum) throw GridError("covariant_hessian needs a spectral representation");
  FieldJets jets = f.grid->synthesize_jets(*f.spectrum);
  return {f.grid, std::move(jets.h11), std::move(jets.h12), std::move(jets.h22)};
}

double evaluate_at(const Spectrum& s, const Vec& u) {
  check_unit(u);
  if (s.dim == 2) {
    double t = std::atan2(u[1], u[0]);
    double c1 = std::cos(t), s1 = std::sin(t);
    double ck = 1.0, sk = 0.0;
    double v = s.c[0];
    for (int k = 1; k <= s.degree; ++k) {
      double cn = ck * c1 - sk * s1;
      double sn = sk * c1 + ck * s1;
      ck = cn;
      sk = sn;
      v += s.c[2 * k - 1] * ck + s.c[2 * k] * sk;
    }
    return v;
  }

  double theta, phi;
  angles_of(u, theta, phi);
  static thread_local std::vector<double> P;
  P.resize(gsl_sf_legendre_array_n(s.degree));
  gsl_sf_legendre_array_e(GSL_SF_LEGENDRE_SPHARM, s.degree, std::cos(theta), 1.0, P.data());
  double v = 0;
  for (int m = 0; m <= s.degree; ++m) {
    double nrm = (m == 0) ? 1.0 : std::sqrt(2.0);
    double a = 0, b = 0;
    for (int l = m; l <= s.degree; ++l) {
      double p = P[tri_index(l, m)];
      a += s.c[Spectrum::sph_index(l, m)] * p;
      if (m > 0) b += s.c[Spectrum::sph_index(l, -m)] * p;
    }
    v += nrm * (a * std::cos(m * phi) + b * std::sin(m * phi));
  }
  return v;
}

SurfaceJet evaluate_jet(const Spectrum& s, const Vec& u) {
  check_unit(u);
  SurfaceJet jet;
  if (s.dim == 2) {
    double t = std::atan2(u[1], u[0]);
    double c1 = std::cos(t), s1 = std::sin(t);
    double ck = 1.0, sk = 0.0;
    jet.h = s.c[0];
    for (int k = 1; k <= s.degree; ++k) {
      double cn = ck * c1 - sk * s1;
      double sn = sk * c1 + ck * s1;
      ck = cn;
      sk = sn;
      double a = s.c[2 * k - 1], b = s.c[2 * k];
      jet.h += a * ck + b * sk;
      jet.d1 += k * (b * ck - a * sk);
      jet.h11 -= k * k * (a * ck + b * sk);
    }
    return jet;
  }

  double theta, phi;
  angles_of(u, theta, phi);
  static thread_local std::vector<double> P, dP, d2P;
  size_t nsz = gsl_sf_legendre_array_n(s.degree);
  P.resize(nsz);
  dP.resize(nsz);
  d2P.resize(nsz);
  gsl_sf_legendre_deriv2_alt_array_e(GSL_SF_LEGENDRE_SPHARM, s.degree, std::cos(theta), 1.0,
                                     P.data(), dP.data(), d2P.data());
  double h = 0, ht = 0, htt = 0, hp = 0, htp = 0, hpp = 0;
  for (int m = 0; m <= s.degree; ++m) {
    double nrm = (m == 0) ? 1.0 : std::sqrt(2.0);
    double ap = 0, bp = 0, ad = 0, bd = 0, ad2 = 0, bd2 = 0;
    for (int l = m; l <= s.degree; ++l) {
      int t = tri_index(l, m);
      double cc = s.c[Spectrum::sph_index(l, m)];
      ap += cc * P[t];
      ad += cc * dP[t];
      ad2 += cc * d2P[t];
      if (m > 0) {
        double cs = s.c[Spectrum::sph_index(l, -m)];
        bp += cs * P[t];
        bd += cs * dP[t];
        bd2 += cs * d2P[t];
      }
    }
    double ce = std::cos(m * phi), se = std::sin(m * phi);
    h += nrm * (ap * ce + bp * se);
    ht += nrm * (ad * ce + bd * se);
    htt += nrm * (ad2 * ce + bd2 * se);
    hp += nrm * m * (bp * ce - ap * se);
    htp += nrm * m * (bd * ce - ad * se);
    hpp -= nrm * m * m * (ap * ce + bp * se);
  }
  double st = std::sin(theta), ct = std::cos(theta);
  double cot = ct / st;
  jet.h = h;
  jet.d1 = ht;
  jet.d2 = hp / st;
  jet.h11 = htt;
  jet.h12 = htp / st - cot * (hp / st);
  jet.h22 = hpp / (st * st) + cot * ht;
  return jet;
}

std::pair<Vec, Vec> jet_frame(const Vec& u, int dim) {
  if (dim == 2) return {Vec{-u[1], u[0], 0.0}, Vec{}};
  double theta, phi;
  angles_of(u, theta, phi);
  double st = std::sin(theta), ct = std::cos(theta);
  Vec e_theta{ct * std::cos(phi), ct * std::sin(phi), -st};
  Vec e_phi{-std::sin(phi), std::cos(phi), 0.0};
  return {e_theta, e_phi};
}

}  // namespace lpstab
