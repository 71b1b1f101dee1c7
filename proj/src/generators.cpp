#include "lpstab/generators.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <random>

#include "lpstab/constants.hpp"

namespace lpstab {

namespace {

double u01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }
double uniform_pm1(std::mt19937_64& rng) { return 2.0 * u01(rng) - 1.0; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

Spectrum constant_spectrum(int dim, double value) {
  Spectrum s = Spectrum::zero(dim, 1);
  s.c[0] = dim == 2 ? value : value * std::sqrt(4.0 * kPi);
  return s;
}

// zero the odd-degree coefficients; used where symmetry holds analytically
// and only quadrature roundoff breaks it
void enforce_even(Spectrum& s) {
  if (s.dim == 2) {
    for (int k = 1; k <= s.degree; k += 2) s.c[2 * k - 1] = s.c[2 * k] = 0.0;
  } else {
    for (int l = 1; l <= s.degree; l += 2)
      for (int m = -l; m <= l; ++m) s.c[Spectrum::sph_index(l, m)] = 0.0;
  }
}

}  // namespace

std::shared_ptr<const SphereGrid> default_grid(int dim, const std::vector<int>& resolution) {
  if (!resolution.empty()) return SphereGrid::make(dim, resolution);
  if (dim == 2) return SphereGrid::make(2, {kDefaultCircleNodes});
  return SphereGrid::make(3, {kDefaultGaussOrder, kDefaultLongitudes});
}

std::string BodySpec::name() const {
  std::string base;
  if (family == "ball") {
    base = "ball_r" + fmt(radius);
  } else if (family == "ellipsoid") {
    base = "ellipsoid";
    for (int i = 0; i < dimension; ++i)
      for (int j = i; j < dimension; ++j) base += "_" + fmt(axes(i, j));
  } else if (family == "harmonic") {
    base = "harmonic_k" + std::to_string(degree) +
           (dimension == 3 ? "m" + std::to_string(order) : "") + "_e" + fmt(eps);
  } else if (family == "cap_cut") {
    base = "capcut_e" + fmt(eps);
  } else if (family == "random") {
    base = "random_s" + std::to_string(seed) + "_d" + fmt(decay);
  } else {
    base = family;
  }
  return base + "_n" + std::to_string(dimension);
}

ConvexBody ball(double r, std::shared_ptr<const SphereGrid> grid) {
  if (!(r > 0)) throw BodyError("ball radius must be positive");
  int dim = grid->dim();
  return ConvexBody::from_coefficients(std::move(grid), constant_spectrum(dim, r));
}

ConvexBody ellipsoid(const Mat3& A, std::shared_ptr<const SphereGrid> grid) {
  const int n = grid->dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (std::abs(A(i, j) - A(j, i)) > 1e-12) throw BodyError("ellipsoid matrix not symmetric");
  std::vector<double> vals(grid->node_count());
  for (int k = 0; k < grid->node_count(); ++k) {
    double v = norm(A.apply(grid->nodes()[k]));
    if (!(v > 0)) throw BodyError("ellipsoid matrix not positive definite");
    vals[k] = v;
  }
  Spectrum s = grid->analyze(vals);
  return ConvexBody::from_coefficients(std::move(grid), std::move(s));
}

ConvexBody harmonic_bump(double eps, int degree, int order,
                         std::shared_ptr<const SphereGrid> grid) {
  const int dim = grid->dim();
  if (degree < 2 || degree > grid->max_degree()) throw BodyError("harmonic degree out of range");
  if (dim == 3 && std::abs(order) > degree) throw BodyError("harmonic order out of range");
  Spectrum s = Spectrum::zero(dim, degree);
  if (dim == 2) {
    s.c[0] = 1.0;
    s.c[2 * degree - 1] = eps;
  } else {
    s.c[0] = std::sqrt(4.0 * kPi);
    s.c[Spectrum::sph_index(degree, order)] = eps;
  }
  return ConvexBody::from_coefficients(std::move(grid), std::move(s));
}

ConvexBody random_convex(unsigned seed, double decay, std::shared_ptr<const SphereGrid> grid) {
  if (!(decay > 1.0)) throw BodyError("random body decay must exceed 1");
  const int dim = grid->dim();
  std::mt19937_64 rng(seed);
  std::string why;
  for (int attempt = 0; attempt < 100; ++attempt) {
    Spectrum s;
    if (dim == 2) {
      const int kmax = 12;
      s = Spectrum::zero(2, kmax);
      s.c[0] = 1.0;
      for (int k = 1; k <= kmax; ++k) {
        double sigma = 0.35 * std::pow(k, -decay);
        s.c[2 * k - 1] = sigma * uniform_pm1(rng);
        s.c[2 * k] = sigma * uniform_pm1(rng);
      }
    } else {
      const int lmax = 8;
      s = Spectrum::zero(3, lmax);
      s.c[0] = std::sqrt(4.0 * kPi);
      for (int l = 1; l <= lmax; ++l) {
        double sigma = 0.5 * std::pow(l, -decay) / std::sqrt(2.0 * l + 1.0);
        for (int m = -l; m <= l; ++m)
          s.c[Spectrum::sph_index(l, m)] = sigma * uniform_pm1(rng);
      }
    }
    if (auto K = ConvexBody::try_from_coefficients(grid, std::move(s), &why)) return *K;
  }
  throw BodyError("random body generation exhausted 100 draws (seed " + std::to_string(seed) +
                  ", decay " + fmt(decay) + "): " + why);
}

ConvexBody smoothed_cap_cut(double cap_height, double smoothing,
                            std::shared_ptr<const SphereGrid> grid) {
  if (!(cap_height > 0.0) || !(cap_height < 0.5))
    throw BodyError("cap height must lie in (0, 0.5)");
  const int dim = grid->dim();
  const double t = 1.0 - cap_height;
  // support of the ball with opposite caps beyond |x.e| = t removed; the
  // cut axis is e1 in the plane and the polar axis for n = 3
  std::vector<double> vals(grid->node_count());
  for (int k = 0; k < grid->node_count(); ++k) {
    const Vec& u = grid->nodes()[k];
    double c = std::abs(dim == 2 ? u[0] : u[2]);
    vals[k] = c <= t ? 1.0 : t * c + std::sqrt(1.0 - t * t) * std::sqrt(1.0 - c * c);
  }
  Spectrum raw = grid->analyze(vals);
  enforce_even(raw);

  auto damped = [&](double s) {
    Spectrum d = raw;
    if (dim == 2) {
      for (int k = 1; k <= d.degree; ++k) {
        double factor = std::exp(-s * k * k);
        d.c[2 * k - 1] *= factor;
        d.c[2 * k] *= factor;
      }
    } else {
      for (int l = 1; l <= d.degree; ++l) {
        double factor = std::exp(-s * l * l);
        for (int m = -l; m <= l; ++m) d.c[Spectrum::sph_index(l, m)] *= factor;
      }
    }
    return d;
  };

  if (smoothing > 0.0)
    return ConvexBody::from_coefficients(std::move(grid), damped(smoothing));

  // The ladder accepts the first rung with (a) a solid curvature margin,
  // not a barely positive one - functionals of 1/f on the flattened caps
  // would otherwise be ill-conditioned - and (b) spectral content decayed
  // below 1e-7 at the band limit, so the body is actually resolved on its
  // grid and volume-preserving images of it stay faithful.
  std::string why;
  const int lmax = grid->max_degree();
  for (double s = 1e-3; s < 1.0; s *= 2.0) {
    if (std::exp(-s * lmax * lmax) > 1e-7) continue;
    if (auto K = ConvexBody::try_from_coefficients(grid, damped(s), &why)) {
      if (K->min_convexity() >= 0.02) return *K;
      why = "curvature margin below 0.02";
    }
  }
  throw BodyError("cap cut not convex at any smoothing in the ladder: " + why);
}

double harmonic_convexity_threshold(int dim, int degree, int order) {
  if (dim == 2) return 1.0 / (degree * degree - 1.0);
  static std::mutex mu;
  static std::map<std::pair<int, int>, double> cache;
  {
    std::scoped_lock lock(mu);
    auto it = cache.find({degree, order});
    if (it != cache.end()) return it->second;
  }
  auto grid = default_grid(3);
  auto valid = [&](double eps) {
    Spectrum s = Spectrum::zero(3, degree);
    s.c[0] = std::sqrt(4.0 * kPi);
    s.c[Spectrum::sph_index(degree, order)] = eps;
    return ConvexBody::try_from_coefficients(grid, std::move(s)).has_value();
  };
  double lo = 0.0, hi = 2.0;
  while (valid(hi)) hi *= 2.0;
  for (int it = 0; it < 50; ++it) {
    double mid = 0.5 * (lo + hi);
    (valid(mid) ? lo : hi) = mid;
  }
  std::scoped_lock lock(mu);
  cache[{degree, order}] = lo;
  return lo;
}

ConvexBody make_body(const BodySpec& spec) {
  auto grid = default_grid(spec.dimension, spec.resolution);
  if (spec.family == "ball") return ball(spec.radius, grid);
  if (spec.family == "ellipsoid") return ellipsoid(spec.axes, grid);
  if (spec.family == "harmonic") return harmonic_bump(spec.eps, spec.degree, spec.order, grid);
  if (spec.family == "cap_cut") return smoothed_cap_cut(spec.eps, spec.smoothing, grid);
  if (spec.family == "random") return random_convex(spec.seed, spec.decay, grid);
  throw BodyError("unknown body family: " + spec.family);
}

std::vector<BodySpec> default_suite(int dim) {
  std::vector<BodySpec> out;
  auto push = [&](BodySpec s) {
    s.dimension = dim;
    out.push_back(std::move(s));
  };

  BodySpec b;
  b.family = "ball";
  b.radius = 1.0;
  push(b);

  auto rot2 = [](double deg) {
    double c = std::cos(deg * kPi / 180.0), s = std::sin(deg * kPi / 180.0);
    Mat3 r;
    r.m = {c, -s, 0, s, c, 0, 0, 0, 1};
    return r;
  };
  BodySpec e;
  e.family = "ellipsoid";
  if (dim == 2) {
    e.axes = Mat3::diag(1.2, 1.0 / 1.2, 1.0);
    push(e);
    e.axes = Mat3::diag(1.5, 0.8, 1.0);
    push(e);
    Mat3 r = rot2(30.0);
    e.axes = r * Mat3::diag(1.3, 0.9, 1.0) * r.transposed();
    push(e);
  } else {
    e.axes = Mat3::diag(1.2, 1.0 / 1.2, 1.0);
    push(e);
    e.axes = Mat3::diag(1.3, 0.9, 1.1);
    push(e);
    Mat3 r = rot2(30.0);
    e.axes = r * Mat3::diag(1.25, 0.85, 1.05) * r.transposed();
    push(e);
  }

  for (int k : {2, 3, 4}) {
    int order = dim == 3 ? k / 2 : 0;
    double thr = harmonic_convexity_threshold(dim, k, order);
    for (double epsv : {0.02, 0.05, 0.1 * thr}) {
      if (epsv >= thr) continue;  // keep every suite body strictly convex
      BodySpec h;
      h.family = "harmonic";
      h.degree = k;
      h.order = order;
      h.eps = epsv;
      push(h);
    }
  }

  for (double eps : {0.05, 0.1, 0.2}) {
    BodySpec c;
    c.family = "cap_cut";
    c.eps = eps;
    push(c);
  }

  for (unsigned seed = 1; seed <= 5; ++seed) {
    BodySpec r;
    r.family = "random";
    r.seed = seed;
    r.decay = 3.0;
    push(r);
  }
  return out;
}

}  // namespace lpstab
