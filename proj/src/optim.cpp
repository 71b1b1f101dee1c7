#include "lpstab/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

namespace lpstab {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& x0, double step,
                             const NelderMeadOptions& opts) {
  const int n = static_cast<int>(x0.size());
  // adaptive coefficients (useful for the higher-dimensional searches)
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / n;
  const double gamma = 0.75 - 0.5 / n;
  const double delta = 1.0 - 1.0 / n;

  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (int i = 0; i < n; ++i) pts[i + 1][i] += step;
  for (int i = 0; i <= n; ++i) fv[i] = f(pts[i]);

  std::vector<int> order(n + 1);
  NelderMeadResult res;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    int best = order[0], worst = order[n], second = order[n - 1];

    double diam = 0.0;
    for (int i = 0; i <= n; ++i)
      for (int k = 0; k < n; ++k) diam = std::max(diam, std::abs(pts[i][k] - pts[best][k]));
    double spread = std::abs(fv[worst] - fv[best]);
    if (diam < opts.xtol && spread < opts.ftol * (1.0 + std::abs(fv[best]))) {
      res.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (int i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (int k = 0; k < n; ++k) centroid[k] += pts[i][k] / n;
    }

    auto along = [&](double t) {
      std::vector<double> p(n);
      for (int k = 0; k < n; ++k) p[k] = centroid[k] + t * (pts[worst][k] - centroid[k]);
      return p;
    };

    std::vector<double> xr = along(-alpha);
    double fr = f(xr);
    if (fr < fv[best]) {
      std::vector<double> xe = along(-alpha * beta);
      double fe = f(xe);
      if (fe < fr) {
        pts[worst] = std::move(xe);
        fv[worst] = fe;
      } else {
        pts[worst] = std::move(xr);
        fv[worst] = fr;
      }
    } else if (fr < fv[second]) {
      pts[worst] = std::move(xr);
      fv[worst] = fr;
    } else {
      bool outside = fr < fv[worst];
      std::vector<double> xc = along(outside ? -alpha * gamma : gamma);
      double fc = f(xc);
      if (fc < std::min(fr, fv[worst])) {
        pts[worst] = std::move(xc);
        fv[worst] = fc;
      } else {
        // shrink toward the best vertex
        for (int i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (int k = 0; k < n; ++k) pts[i][k] = pts[best][k] + delta * (pts[i][k] - pts[best][k]);
          fv[i] = f(pts[i]);
        }
      }
    }
  }

  int best = 0;
  for (int i = 1; i <= n; ++i)
    if (fv[i] < fv[best]) best = i;
  res.x = pts[best];
  res.value = fv[best];
  res.iterations = it;
  return res;
}

NewtonResult newton_minimize(
    int dim, const std::function<double(const std::vector<double>&)>& value,
    const std::function<void(const std::vector<double>&, std::vector<double>&)>& grad,
    const std::function<void(const std::vector<double>&, std::vector<double>&)>& hess,
    const std::vector<double>& x0, const NewtonOptions& opts) {
  NewtonResult res;
  std::vector<double> x = x0;
  std::vector<double> g(dim), H(dim * dim), xn(dim);
  double fx = value(x);

  int it = 0;
  for (; it < opts.max_iter; ++it) {
    grad(x, g);
    double gn = 0;
    for (double gi : g) gn += gi * gi;
    gn = std::sqrt(gn);
    res.grad_norm = gn;
    if (gn <= opts.grad_tol) {
      res.converged = true;
      break;
    }

    hess(x, H);
    Eigen::Map<Eigen::MatrixXd> Hm(H.data(), dim, dim);
    Eigen::Map<Eigen::VectorXd> gm(g.data(), dim);
    Eigen::VectorXd step = -gm;  // fallback: steepest descent
    Eigen::LDLT<Eigen::MatrixXd> ldlt(Hm);
    if (ldlt.info() == Eigen::Success) {
      Eigen::VectorXd s = ldlt.solve(-gm);
      if (s.allFinite() && s.dot(-gm) >= 0) step = s;
    }

    double t = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 60; ++bt, t *= 0.5) {
      for (int k = 0; k < dim; ++k) xn[k] = x[k] + t * step[k];
      if (opts.feasible && !opts.feasible(xn)) continue;
      double fn = value(xn);
      if (std::isfinite(fn) && fn <= fx + 1e-30) {
        x = xn;
        fx = fn;
        moved = true;
        break;
      }
    }
    if (!moved) break;  // no acceptable step left
  }

  grad(x, g);
  double gn = 0;
  for (double gi : g) gn += gi * gi;
  res.grad_norm = std::sqrt(gn);
  res.converged = res.converged || res.grad_norm <= opts.grad_tol;
  res.x = x;
  res.value = fx;
  res.iterations = it;
  return res;
}

double golden_section(const std::function<double(double)>& f, double a, double b,
                      double tol, double* xmin) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  double xm = 0.5 * (a + b);
  if (xmin) *xmin = xm;
  return f(xm);
}

std::vector<int> separated_extrema(const std::vector<Vec>& nodes, const std::vector<double>& key,
                                   bool maximize, int count) {
  std::vector<int> idx(key.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return maximize ? key[a] > key[b] : key[a] < key[b]; });
  std::vector<int> out;
  for (int k : idx) {
    bool close = false;
    for (int s : out)
      if (dot(nodes[k], nodes[s]) > 0.9) close = true;
    if (!close) out.push_back(k);
    if (static_cast<int>(out.size()) >= count) break;
  }
  return out;
}

std::pair<Vec, Vec> tangent_basis(const Vec& u, int dim) {
  if (dim == 2) return {Vec{-u[1], u[0], 0.0}, Vec{0, 0, 0}};
  // pick the coordinate axis least aligned with u
  Vec a = std::abs(u[0]) < 0.9 ? Vec{1, 0, 0} : Vec{0, 1, 0};
  Vec e1 = normalized(a - u * dot(a, u));
  Vec e2{u[1] * e1[2] - u[2] * e1[1], u[2] * e1[0] - u[0] * e1[2],
         u[0] * e1[1] - u[1] * e1[0]};
  return {e1, e2};
}

SphereExtremum refine_on_sphere(const std::function<double(const Vec&)>& f, const Vec& u0,
                                int dim, bool maximize, double initial_step) {
  double sgn = maximize ? -1.0 : 1.0;
  if (dim == 2) {
    double t0 = std::atan2(u0[1], u0[0]);
    double xm = t0;
    golden_section([&](double t) { return sgn * f(direction2(t)); }, t0 - initial_step,
                   t0 + initial_step, 1e-12, &xm);
    Vec u = direction2(xm);
    return {u, f(u)};
  }
  auto [e1, e2] = tangent_basis(u0, 3);
  auto obj = [&](const std::vector<double>& t) {
    Vec u = normalized(u0 + e1 * t[0] + e2 * t[1]);
    return sgn * f(u);
  };
  NelderMeadOptions opts;
  opts.max_iter = 250;
  opts.xtol = 1e-11;
  NelderMeadResult r = nelder_mead(obj, {0.0, 0.0}, initial_step, opts);
  Vec u = normalized(u0 + e1 * r.x[0] + e2 * r.x[1]);
  return {u, f(u)};
}

}  // namespace lpstab
