#pragma once

#include <memory>
#include <optional>
#include <string>

#include "lpstab/sphere_grid.hpp"
#include "lpstab/vec.hpp"

namespace lpstab {

class BodyError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class NotPositive : public BodyError {
  using BodyError::BodyError;
};
class NotStrictlyConvex : public BodyError {
  using BodyError::BodyError;
};
class TranslationLeavesOrigin : public BodyError {
  using BodyError::BodyError;
};

// Smooth, strictly convex body with the origin in its interior, stored as
// the spectral coefficients of its support function. Validation checks
// min h > 0 and positive definiteness of (hess h + h g) at every node;
// node samples of h and of the curvature function f = det(hess h + h g)
// are cached. Instances are immutable.
class ConvexBody {
 public:
  static ConvexBody from_coefficients(std::shared_ptr<const SphereGrid> grid, Spectrum s);
  static std::optional<ConvexBody> try_from_coefficients(std::shared_ptr<const SphereGrid> grid,
                                                         Spectrum s,
                                                         std::string* diagnostic = nullptr);

  int dim() const { return support_.dim; }
  const std::shared_ptr<const SphereGrid>& grid() const { return grid_; }
  const Spectrum& support() const { return support_; }
  const std::vector<double>& support_values() const { return jets_.value; }
  const std::vector<double>& curvature_values() const { return curvature_; }
  const FieldJets& support_jets() const { return jets_; }

  double min_support() const { return min_support_; }
  // smallest eigenvalue of (hess h + h g) over the grid
  double min_convexity() const { return min_convexity_; }
  bool origin_symmetric(double tol = 1e-12) const { return support_.origin_symmetric(tol); }

  double support_at(const Vec& u) const { return evaluate_at(support_, u); }

  // body re-evaluated on another grid (same coefficients, truncated or
  // zero-padded to the new band limit)
  ConvexBody on_grid(std::shared_ptr<const SphereGrid> grid) const;

 private:
  ConvexBody() = default;

  std::shared_ptr<const SphereGrid> grid_;
  Spectrum support_;
  FieldJets jets_;
  std::vector<double> curvature_;
  double min_support_ = 0;
  double min_convexity_ = 0;
};

// curvature function f = det(hess h + h g)/det g as a node field
ScalarField curvature_function(const ConvexBody& K);

// inverse Gauss map: the boundary point with outer normal u
Vec boundary_point(const ConvexBody& K, const Vec& u);

double volume(const ConvexBody& K);

// max width max_u (h(u) + h(-u)), grid maximum refined on the sphere
double diameter(const ConvexBody& K);

// body K - x (x becomes the new origin); x must be interior
ConvexBody translate(const ConvexBody& K, const Vec& x);
ConvexBody scale(const ConvexBody& K, double lambda);
// dilate to the volume of the unit ball
ConvexBody normalize_volume(const ConvexBody& K);

// image under an invertible linear map, re-sampled on a doubled grid and
// projected back to the band limit; throws if convexity is lost
ConvexBody linear_image(const ConvexBody& K, const Mat3& map);

// radial function rho_K(u) = max {t >= 0 : t u in K}
double radial_function(const ConvexBody& K, const Vec& u);
// radial function at every grid node, measured from base (interior)
std::vector<double> radial_field(const ConvexBody& K, const Vec& base);

// volume of the polar body (K - x)^*; x must be interior
double polar_volume_at(const ConvexBody& K, const Vec& x);

struct SantaloResult {
  Vec point;
  double polar_volume = 0;
  double grad_norm = 0;
  int iterations = 0;
  bool converged = false;
};
// interior minimizer of x -> V((K - x)^*)
SantaloResult santalo_point(const ConvexBody& K);

// polar body about the origin, h_{K*} = 1/rho_K projected to the basis
ConvexBody polar_body(const ConvexBody& K);

}  // namespace lpstab
