#pragma once

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpstab/vec.hpp"

namespace lpstab {

class GridError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Spectral coefficients of a real scalar function on S^{n-1}.
//
// n = 2: truncated Fourier series, c = [a0, a1, b1, a2, b2, ...] with
//        f(t) = a0 + sum_k a_k cos(kt) + b_k sin(kt).
// n = 3: real spherical harmonics, orthonormal w.r.t. surface measure,
//        flat index l*l + l + m with m in [-l, l]; m > 0 are
//        sqrt(2) N_lm P_lm(cos th) cos(m ph) terms, m < 0 the matching
//        sin(|m| ph) terms, m = 0 the zonal ones. No Condon-Shortley
//        phase.
struct Spectrum {
  int dim = 0;
  int degree = 0;
  std::vector<double> c;

  static int coeff_count(int dim, int degree) {
    return dim == 2 ? 1 + 2 * degree : (degree + 1) * (degree + 1);
  }

  static Spectrum zero(int dim, int degree) {
    Spectrum s;
    s.dim = dim;
    s.degree = degree;
    s.c.assign(coeff_count(dim, degree), 0.0);
    return s;
  }

  // n=3 flat index of the (l, m) basis function
  static int sph_index(int l, int m) { return l * l + l + m; }

  Spectrum truncated(int new_degree) const;

  bool origin_symmetric(double tol = 1e-12) const;
};

// First and second covariant derivatives of a scalar field at one point,
// in an orthonormal tangent frame. n = 2 uses d1 and h11 only.
struct SurfaceJet {
  double h = 0, d1 = 0, d2 = 0;
  double h11 = 0, h12 = 0, h22 = 0;
};

// Node-wise jets of a whole field (arrays indexed like grid nodes).
struct FieldJets {
  std::vector<double> value, g1, g2, h11, h12, h22;
};

// Quadrature grid plus spectral transform plan for S^{n-1}, n in {2, 3}.
//
// n = 2: N equally spaced nodes, uniform weights 2*pi/N.
// n = 3: Gauss-Legendre nodes in cos(theta) (order L) times M uniform
//        longitudes; weights are the GL weights times 2*pi/M. Nodes stay
//        away from the poles and the set is closed under u -> -u.
//
// Grids are immutable after construction and safe to share across threads.
class SphereGrid {
 public:
  static std::shared_ptr<const SphereGrid> circle(int node_count);
  static std::shared_ptr<const SphereGrid> sphere(int gauss_order, int longitudes);
  // resolution = {N} for n=2, {L, M} for n=3
  static std::shared_ptr<const SphereGrid> make(int dim, std::vector<int> resolution);

  int dim() const { return dim_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  int max_degree() const { return max_degree_; }
  std::vector<int> resolution() const;
  std::string resolution_label() const;

  // same layout, resolution scaled by an integer factor
  std::shared_ptr<const SphereGrid> refined(int factor = 2) const;

  const std::vector<Vec>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  int antipode_index(int k) const;

  double integrate(std::span<const double> values) const;

  // Quadrature projection onto the basis, exact for band-limited input.
  Spectrum analyze(std::span<const double> values, int degree = -1) const;
  std::vector<double> synthesize(const Spectrum& s) const;
  // value + first/second covariant derivatives at every node
  FieldJets synthesize_jets(const Spectrum& s) const;

 private:
  SphereGrid() = default;

  int dim_ = 0;
  int max_degree_ = 0;

  // n = 2
  int n_nodes_ = 0;

  // n = 3
  int gauss_order_ = 0;
  int longitudes_ = 0;
  std::vector<double> theta_, sin_theta_, cos_theta_, gl_weight_;
  std::vector<double> leg_, dleg_, d2leg_;  // [row][triangular (l,m)] tables
  std::vector<double> cos_m_, sin_m_;       // [j][m] longitude tables

  std::vector<Vec> nodes_;
  std::vector<double> weights_;

  int tri_count_ = 0;
  void build_sphere_tables();
};

struct ScalarField {
  std::shared_ptr<const SphereGrid> grid;
  std::vector<double> values;
  std::optional<Spectrum> spectrum;
};

ScalarField make_field(std::shared_ptr<const SphereGrid> grid, std::vector<double> values);
ScalarField synthesize_field(std::shared_ptr<const SphereGrid> grid, const Spectrum& s);
double integrate(const ScalarField& f);
Spectrum analyze(const ScalarField& f);

// Covariant Hessian of a scalar field in an orthonormal tangent frame;
// requires the field to carry its spectrum. n=2 stores the single entry
// in h11.
struct HessianField {
  std::shared_ptr<const SphereGrid> grid;
  std::vector<double> h11, h12, h22;
};
HessianField covariant_hessian(const ScalarField& f);

// Point evaluation from coefficients; u must be unit within 1e-12.
double evaluate_at(const Spectrum& s, const Vec& u);
SurfaceJet evaluate_jet(const Spectrum& s, const Vec& u);

// Frame in which jets are expressed: n=2 the rotated tangent, n=3 the
// (theta, phi) orthonormal frame.
std::pair<Vec, Vec> jet_frame(const Vec& u, int dim);

}  // namespace lpstab
