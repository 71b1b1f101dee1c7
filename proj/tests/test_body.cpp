#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "lpstab/constants.hpp"
#include "lpstab/convex_body.hpp"
#include "lpstab/distances.hpp"
#include "lpstab/lp_functionals.hpp"
#include "lpstab/generators.hpp"
#include "oracles.hpp"

using namespace lpstab;

namespace {

ConvexBody ellipse(double a, double b, std::shared_ptr<const SphereGrid> g) {
  return ellipsoid(Mat3::diag(a, b, 1.0), g);
}

ConvexBody bump(double eps, int k, std::shared_ptr<const SphereGrid> g) {
  return harmonic_bump(eps, k, 0, g);
}

}  // namespace

TEST_CASE("validation") {
  auto g = default_grid(2);
  SUBCASE("unit ball is valid") {
    auto B = ball(1.0, g);
    CHECK(B.min_support() == doctest::Approx(1.0));
    CHECK(B.min_convexity() == doctest::Approx(1.0));
  }
  SUBCASE("degree-2 ripple of amplitude 0.5 is rejected") {
    Spectrum s = Spectrum::zero(2, 2);
    s.c[0] = 1.0;
    s.c[3] = 0.5;  // h + h'' = 1 - 1.5 cos(2t) dips negative
    CHECK_THROWS_AS(ConvexBody::from_coefficients(g, s), NotStrictlyConvex);
  }
  SUBCASE("degree-3 ripple of amplitude 0.1 is fine with margin 0.2") {
    auto K = bump(0.1, 3, g);
    CHECK(K.min_convexity() == doctest::Approx(0.2).epsilon(1e-12));
  }
  SUBCASE("support must be positive") {
    Spectrum s = Spectrum::zero(2, 1);
    s.c[0] = 0.1;
    s.c[1] = 1.0;  // h = 0.1 + cos(t), convex but negative behind the origin
    CHECK_THROWS_AS(ConvexBody::from_coefficients(g, s), NotPositive);
  }
  SUBCASE("cached curvature is reproducible from coefficients") {
    auto K = bump(0.1, 3, g);
    for (int k = 0; k < g->node_count(); k += 17)
      CHECK(std::abs(K.curvature_values()[k] - curvature_at(K, g->nodes()[k])) < 1e-9);
  }
}

TEST_CASE("curvature function") {
  auto g2 = default_grid(2);
  auto g3 = default_grid(3);
  SUBCASE("balls") {
    for (double r : {1.0, 0.7, 2.5}) {
      auto B2 = ball(r, g2);
      auto B3 = ball(r, g3);
      for (int k = 0; k < g2->node_count(); k += 31)
        CHECK(B2.curvature_values()[k] == doctest::Approx(r).epsilon(1e-12));
      for (int k = 0; k < g3->node_count(); k += 331)
        CHECK(B3.curvature_values()[k] == doctest::Approx(r * r).epsilon(1e-12));
    }
  }
  SUBCASE("ellipsoid closed form f = det(A)^2 h^-(n+1)") {
    auto E2 = ellipse(1.5, 1.0, g2);
    for (int k = 0; k < g2->node_count(); k += 13) {
      double h = E2.support_values()[k];
      CHECK(std::abs(E2.curvature_values()[k] - 1.5 * 1.5 / (h * h * h)) < 1e-7);
    }
    Mat3 A = Mat3::diag(1.3, 0.9, 1.1);
    auto E3 = ellipsoid(A, g3);
    double det = A.det();
    for (int k = 0; k < g3->node_count(); k += 131) {
      double h = E3.support_values()[k];
      CHECK(std::abs(E3.curvature_values()[k] - det * det / std::pow(h, 4.0)) < 1e-7);
    }
  }
}

TEST_CASE("boundary points") {
  auto g = default_grid(2);
  auto B = ball(1.0, g);
  Vec u = direction2(0.73);
  Vec x = boundary_point(B, u);
  CHECK(norm(x - u) < 1e-12);

  auto E = ellipse(2.0, 1.0, g);
  Vec be = boundary_point(E, Vec{1, 0, 0});
  CHECK(std::abs(be[0] - 2.0) < 1e-9);
  CHECK(std::abs(be[1]) < 1e-9);

  // support consistency: x.u = h(u), x.v <= h(v) for all grid v
  auto K = bump(0.1, 3, g);
  for (int k = 0; k < g->node_count(); k += 41) {
    Vec bp = boundary_point(K, g->nodes()[k]);
    CHECK(std::abs(dot(bp, g->nodes()[k]) - K.support_values()[k]) < 1e-10);
    for (int j = 0; j < g->node_count(); ++j)
      CHECK(dot(bp, g->nodes()[j]) <= K.support_values()[j] + 1e-8);
  }

  // translate(K, x) = K - x shifts boundary points by -x
  Vec z{0.2, -0.1, 0.0};
  auto Kt = translate(K, z);
  Vec p1 = boundary_point(K, u), p2 = boundary_point(Kt, u);
  CHECK(norm(p1 - z - p2) < 1e-10);
}

TEST_CASE("volume") {
  auto g2 = default_grid(2);
  auto g3 = default_grid(3);
  CHECK(std::abs(volume(ball(1.0, g2)) - kPi) < 1e-10);
  CHECK(std::abs(volume(ball(1.0, g3)) - 4.0 * kPi / 3.0) < 1e-8);

  Mat3 A = Mat3::diag(1.5, 0.8, 1.0);
  CHECK(std::abs(volume(ellipsoid(A, g2)) - kPi * 1.5 * 0.8) < 1e-7);
  Mat3 A3 = Mat3::diag(1.2, 0.9, 1.05);
  CHECK(std::abs(volume(ellipsoid(A3, g3)) - unit_ball_volume(3) * A3.det()) < 1e-7);

  SUBCASE("random perturbed ball against the Monte-Carlo oracle") {
    auto K = random_convex(7, 3.0, g2);
    auto mc = oracles::mc_volume(K, 99, 1000000);
    CHECK(std::abs(volume(K) - mc.value) < 3.0 * mc.stderr_);
  }
}

TEST_CASE("diameter") {
  auto g = default_grid(2);
  CHECK(diameter(ball(1.0, g)) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(diameter(ellipse(1.7, 0.9, g)) - 3.4) < 1e-8);

  auto K = bump(0.1, 3, g);
  auto Kt = translate(K, Vec{0.3, 0.2, 0.0});
  CHECK(std::abs(diameter(K) - diameter(Kt)) < 1e-10);

  // D >= 2 min h about the Santalo point
  auto s = santalo_point(K);
  auto Ks = translate(K, s.point);
  CHECK(diameter(K) >= 2.0 * Ks.min_support() - 1e-12);
}

TEST_CASE("translate, scale, normalize") {
  auto g = default_grid(2);
  auto B3 = ball(3.0, g);
  auto N = normalize_volume(B3);
  CHECK(N.support_at(Vec{1, 0, 0}) == doctest::Approx(1.0).epsilon(1e-12));

  auto B = ball(1.0, g);
  CHECK(std::abs(volume(translate(B, Vec{0.5, 0, 0})) - kPi) < 1e-10);

  auto K = bump(0.1, 3, g);
  CHECK(std::abs(volume(scale(K, 2.0)) - 4.0 * volume(K)) < 1e-9 * volume(K));

  CHECK_THROWS_AS(translate(B, Vec{1.5, 0, 0}), TranslationLeavesOrigin);
  CHECK_THROWS_AS(scale(B, -1.0), BodyError);
}

TEST_CASE("linear images") {
  auto g = default_grid(2);
  auto K = bump(0.08, 3, g);
  SUBCASE("identity map returns identical coefficients") {
    auto I = linear_image(K, Mat3::identity());
    for (size_t i = 0; i < K.support().c.size(); ++i)
      CHECK(std::abs(I.support().c[i] - K.support().c[i]) < 1e-12);
  }
  SUBCASE("unimodular diagonal preserves the disc volume") {
    auto L = linear_image(ball(1.0, g), Mat3::diag(2.0, 0.5, 1.0));
    CHECK(std::abs(volume(L) - kPi) < 1e-7);
  }
  SUBCASE("random special-linear map preserves volume") {
    std::mt19937_64 rng(21);
    auto uni = [&] { return 2.0 * oracles::u01(rng) - 1.0; };
    Mat3 m = Mat3::identity();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m(i, j) += 0.3 * uni();
    double d = m.det();
    double s = (d > 0 ? 1.0 : -1.0) / std::sqrt(std::abs(d));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m(i, j) *= s;
    auto L = linear_image(K, m);
    CHECK(std::abs(volume(L) - volume(K)) < 1e-6);
    auto mc = oracles::mc_volume(L, 5, 1000000);
    CHECK(std::abs(volume(L) - mc.value) < 3.0 * mc.stderr_);
  }
  SUBCASE("singular maps are rejected") {
    CHECK_THROWS_AS(linear_image(K, Mat3::diag(1.0, 0.0, 1.0)), BodyError);
  }
}

TEST_CASE("radial function") {
  auto g = default_grid(2);
  auto B = ball(1.0, g);
  for (double t : {0.0, 0.4, 2.0})
    CHECK(radial_function(B, direction2(t)) == doctest::Approx(1.0).epsilon(1e-12));

  auto E = ellipse(2.0, 1.0, g);
  CHECK(std::abs(radial_function(E, Vec{1, 0, 0}) - 2.0) < 1e-8);

  SUBCASE("support certificate and bisection oracle on a perturbed disc") {
    auto K = bump(0.1, 3, g);
    // the membership oracle circumscribes K by O(spacing^2); test it on an
    // 8x finer grid so its own error sits well below the certified band
    auto Kf = K.on_grid(g->refined(8));
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 100; ++rep) {
      Vec u = direction2(2.0 * kPi * oracles::u01(rng));
      double rho = radial_function(K, u);
      // never outside: the support inequality holds at every grid normal
      double worst = -1e9;
      for (int j = 0; j < g->node_count(); ++j)
        worst = std::max(worst, rho * dot(u, g->nodes()[j]) - K.support_values()[j]);
      CHECK(worst <= 1e-8);
      // never interior: largest t with t*u in K, by bisection
      double lo = 0.0, hi = 2.0;
      for (int it = 0; it < 50; ++it) {
        double mid = 0.5 * (lo + hi);
        (oracles::contains(Kf, u * mid) ? lo : hi) = mid;
      }
      CHECK(std::abs(rho - lo) < 1e-6);
    }
  }
}

TEST_CASE("polar volume and Santalo point") {
  auto g2 = default_grid(2);
  auto g3 = default_grid(3);
  CHECK(std::abs(polar_volume_at(ball(1.0, g2), Vec{}) - kPi) < 1e-9);
  Mat3 A = Mat3::diag(1.4, 0.8, 1.0);
  CHECK(std::abs(polar_volume_at(ellipsoid(A, g2), Vec{}) - kPi / (1.4 * 0.8)) < 1e-7);
  Mat3 A3 = Mat3::diag(1.2, 0.9, 1.05);
  CHECK(std::abs(polar_volume_at(ellipsoid(A3, g3), Vec{}) -
                 unit_ball_volume(3) / A3.det()) < 1e-7);

  SUBCASE("strictly larger polar volume off-centre, convex in x") {
    auto B = ball(1.0, g2);
    CHECK(polar_volume_at(B, Vec{0.3, 0, 0}) > kPi + 1e-3);
    // convexity along a segment by central second difference
    double d = 1e-3;
    double c0 = polar_volume_at(B, Vec{0.1, 0.05, 0});
    double cp = polar_volume_at(B, Vec{0.1 + d, 0.05, 0});
    double cm = polar_volume_at(B, Vec{0.1 - d, 0.05, 0});
    CHECK(cp + cm - 2.0 * c0 > 0.0);
    CHECK_THROWS_AS(polar_volume_at(B, Vec{1.0, 0, 0}), BodyError);
  }
  SUBCASE("origin-symmetric bodies have s = 0") {
    auto K = bump(0.05, 4, g2);
    auto s = santalo_point(K);
    CHECK(norm(s.point) < 1e-8);
    CHECK(s.converged);
  }
  SUBCASE("translation equivariance") {
    auto K = bump(0.1, 3, g2);
    Vec z{0.17, -0.06, 0};
    Vec s1 = santalo_point(K).point;
    Vec s2 = santalo_point(translate(K, z)).point;
    CHECK(norm(s1 - z - s2) < 1e-8);
  }
  SUBCASE("first-order optimality residual") {
    Spectrum s = Spectrum::zero(2, 3);
    s.c[0] = 1.0;
    s.c[1] = 0.05;  // cos t
    s.c[5] = 0.1;   // cos 3t
    auto K = ConvexBody::from_coefficients(g2, s);
    auto sr = santalo_point(K);
    Vec grad{};
    for (int k = 0; k < g2->node_count(); ++k) {
      double hx = K.support_values()[k] - dot(sr.point, g2->nodes()[k]);
      grad += g2->nodes()[k] * (g2->weights()[k] * std::pow(hx, -3.0));
    }
    CHECK(norm(grad) <= 1e-9);
  }
  SUBCASE("Blaschke-Santalo bound with ellipsoid equality") {
    auto E = ellipse(1.3, 0.9, g2);
    auto s = santalo_point(E);
    double prod = volume(E) * s.polar_volume;
    CHECK(prod <= kPi * kPi + 1e-8);
    CHECK(std::abs(prod - kPi * kPi) < 1e-7);
    auto K = bump(0.1, 3, g2);
    auto sk = santalo_point(K);
    CHECK(volume(K) * sk.polar_volume <= kPi * kPi + 1e-8);
  }
}

TEST_CASE("polar body round trip") {
  auto g = default_grid(2);
  Mat3 A = Mat3::diag(1.25, 0.85, 1.0);
  auto E = ellipsoid(A, g);
  auto P = polar_body(E);
  // (A B)^* = A^{-1} B
  for (int k = 0; k < g->node_count(); k += 29) {
    double expect = norm(A.inverse().apply(g->nodes()[k]));
    CHECK(std::abs(P.support_values()[k] - expect) < 1e-8);
  }
}

TEST_CASE("l2 distance") {
  auto g = default_grid(2);
  auto B = ball(1.0, g);
  auto K = bump(0.1, 3, g);
  CHECK(l2_distance(K, K) == 0.0);
  CHECK(std::abs(l2_distance(ball(1.7, g), B) - 0.7) < 1e-12);
  CHECK(std::abs(l2_distance(K, B) - 0.1 / std::sqrt(2.0)) < 1e-10);

  SUBCASE("metric properties on random triples") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 5; ++rep) {
      auto X = random_convex(100 + rep, 3.0, g);
      auto Y = random_convex(200 + rep, 2.5, g);
      auto Z = random_convex(300 + rep, 3.5, g);
      CHECK(l2_distance(X, Y) == l2_distance(Y, X));
      CHECK(l2_distance(X, Z) <= l2_distance(X, Y) + l2_distance(Y, Z) + 1e-12);
    }
  }
  SUBCASE("grid mismatch is an error") {
    auto other = SphereGrid::make(2, {256});
    CHECK_THROWS_AS(l2_distance(K, ball(1.0, other)), BodyError);
  }
}
