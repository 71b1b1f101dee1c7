#pragma once

#include <map>
#include <string>
#include <vector>

#include "lpstab/distances.hpp"
#include "lpstab/generators.hpp"
#include "lpstab/lp_functionals.hpp"

namespace lpstab {

// One verified inequality (or identity) instance. margin = rhs - lhs;
// mandatory rows pass iff margin >= -tol * max(1, |rhs|). Rows whose check
// name starts with "trend:" carry observational data only and are excluded
// from pass/fail aggregation, as are rows that record a skipped or failed
// computation in `error`.
struct StabilityReport {
  std::string check;
  std::string body;
  int n = 0;
  double p = std::numeric_limits<double>::quiet_NaN();
  double lhs = 0;
  double rhs = 0;
  double margin = 0;
  bool pass = true;
  std::string error;
  std::vector<std::pair<std::string, double>> aux;

  bool trend() const { return check.rfind("trend:", 0) == 0; }
};

// Per-body workspace: the generated body, its volume-normalized dilate,
// and memoized functionals shared by the checks.
class BodyContext {
 public:
  BodyContext(std::string id, ConvexBody body);
  static BodyContext from_spec(const BodySpec& spec);

  const std::string& id() const { return id_; }
  int dim() const { return body_.dim(); }
  const ConvexBody& body() const { return body_; }
  const ConvexBody& normalized() const { return normalized_; }
  bool symmetric() const { return symmetric_; }

  const Vec& santalo() const;            // s(K~)
  double diam() const;                   // D(K~)
  const WidthResult& width(double p) const;          // E_p(K~)
  const LpCurvatureSummary& curvature_ratio(double p) const;  // R_p(K~)
  const CentroAffineResult& centro_affine() const;   // on K~
  double asymmetry() const;              // A(K~, B)

 private:
  std::string id_;
  ConvexBody body_;
  ConvexBody normalized_;
  bool symmetric_ = false;

  // memoized lazily; contexts are used by one thread at a time
  mutable bool have_santalo_ = false;
  mutable Vec santalo_{};
  mutable double diam_ = -1;
  mutable std::map<double, WidthResult> widths_;
  mutable std::map<double, LpCurvatureSummary> ratios_;
  mutable std::unique_ptr<CentroAffineResult> centro_;
  mutable double asymmetry_ = -1;
};

// --- individual checks; each returns one row per verified inequality ---

// |e_p - s|^2 <= c0 (1 - E_p) D^{2-p} on the normalized body, p in [-n, 0)
std::vector<StabilityReport> check_entropy_santalo_gap(const BodyContext& ctx, double p,
                                                       double tol = 1e-6);
// p >= 1: E_p(K~) <= R_p and mean width <= E_p(K~)^{1/p}
std::vector<StabilityReport> check_width_upper(const BodyContext& ctx, double p,
                                               double tol = 1e-6);
// -n < p < 0: radius bracket and the L^2 deficit bound
std::vector<StabilityReport> check_width_negp(const BodyContext& ctx, double p,
                                              double tol = 1e-6);
// p = -1, origin-symmetric: sharper delta_2 bound plus the cube-root
// diameter bound
std::vector<StabilityReport> check_harmonic_width(const BodyContext& ctx, double tol = 1e-6);
// 0 <= p < 1, origin-symmetric: radius bracket, delta_2 bound, diameter
// bound, and the harmonic-width chain E_{-1} >= 1/R_p
std::vector<StabilityReport> check_symmetric_stability(const BodyContext& ctx, double p,
                                                       double tol = 1e-6);
// exact algebraic identity linking the harmonic means of 1/h; quadrature
// self-test
std::vector<StabilityReport> check_polarization_identity(const BodyContext& ctx,
                                                         double tol = 1e-10);
// n = 2: d_BM upper bound vs sqrt(R_{-2}) (symmetric bodies) and the
// normalized centro-affine bracket min <= 1 <= max
std::vector<StabilityReport> check_planar_affine(const BodyContext& ctx, double tol = 1e-6);
// min/max of the centro-affine curvature under a volume-preserving map
std::vector<StabilityReport> check_sln_invariance(const BodyContext& ctx, const Mat3& map,
                                                  double rel_tol);
// gradient fields vanish at critical bodies; norms reported as trend data
// elsewhere
std::vector<StabilityReport> check_gradient_stationarity(const BodyContext& ctx, double p);

// deterministic volume-preserving test map
Mat3 seeded_unimodular(int dim, unsigned seed);

struct SuiteConfig {
  int dim = 2;
  std::vector<double> p_entropy_gap;
  std::vector<double> p_upper{1.0, 2.0, 5.0};
  std::vector<double> p_negative;
  std::vector<double> p_subunit{0.0, 0.25, 0.5, 0.75};
  int sln_maps = 10;
  double sln_rel_tol = 1e-5;
  double tol = 1e-6;
  bool asymmetry_trend = true;
  unsigned map_seed = 1234;
  int threads = 0;  // 0 = hardware concurrency

  static SuiteConfig defaults(int dim);
};

// Runs every applicable check on every generated body. Generator and check
// failures become error rows; the suite never aborts. Rows are ordered by
// (body, check, p) regardless of thread count.
std::vector<StabilityReport> run_suite(const std::vector<BodySpec>& specs,
                                       const SuiteConfig& config);

// true when no mandatory (non-trend, non-error) row fails
bool suite_passes(const std::vector<StabilityReport>& reports);

}  // namespace lpstab
