#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lpstab/constants.hpp"
#include "lpstab/distances.hpp"
#include "lpstab/generators.hpp"
#include "lpstab/lp_functionals.hpp"
#include "oracles.hpp"

using namespace lpstab;

TEST_CASE("symmetric difference volume") {
  auto g = default_grid(2);
  auto B = ball(1.0, g);
  SUBCASE("identical bodies") {
    CHECK(symmetric_difference_volume(B, B, Vec{}) < 1e-10);
  }
  SUBCASE("nested balls have volume difference") {
    auto B2 = ball(1.3, g);
    CHECK(std::abs(symmetric_difference_volume(B2, B, Vec{}) - (1.3 * 1.3 - 1.0) * kPi) < 1e-8);
  }
  SUBCASE("base point must be interior to both") {
    auto Bt = translate(ball(0.4, g), Vec{-0.3, 0, 0});
    CHECK_THROWS_AS(symmetric_difference_volume(B, Bt, Vec{0.8, 0, 0}), BodyError);
  }
  SUBCASE("Monte-Carlo agreement for an ellipse/ball pair") {
    auto E = ellipsoid(Mat3::diag(1.2, 1.0 / 1.2, 1.0), g);
    double quad = symmetric_difference_volume(E, B, Vec{});
    auto mc = oracles::mc_symmetric_difference(E, B, 77, 1000000);
    CHECK(std::abs(quad - mc.value) < 3.0 * mc.stderr_);
  }
}

TEST_CASE("relative asymmetry to the ball") {
  auto g = default_grid(2);
  SUBCASE("balls have zero asymmetry") {
    CHECK(relative_asymmetry_to_ball(ball(1.0, g)).value < 1e-9);
  }
  SUBCASE("the search recovers a translation") {
    auto Bt = translate(ball(1.0, g), Vec{0.25, -0.15, 0});
    auto r = relative_asymmetry_to_ball(Bt);
    CHECK(r.value < 1e-6);
    CHECK(std::abs(r.translation[0] + 0.25) < 1e-4);
    CHECK(std::abs(r.translation[1] - 0.15) < 1e-4);
  }
  SUBCASE("normalized ellipse against the Monte-Carlo oracle") {
    auto E = normalize_volume(ellipsoid(Mat3::diag(1.2, 1.0 / 1.2, 1.0), g));
    auto r = relative_asymmetry_to_ball(E);
    // rebuild the optimal ball and compare the symmetric difference by
    // seeded sampling
    auto Bopt = translate(ball(1.0, g), -r.translation);
    double quad = r.value * unit_ball_volume(2);
    auto mc = oracles::mc_symmetric_difference(E, Bopt, 123, 1000000);
    CHECK(std::abs(quad - mc.value) < 3.0 * mc.stderr_);
  }
}

TEST_CASE("Banach-Mazur distance to the ball") {
  auto g = default_grid(2);
  SUBCASE("ball: unity at the initial iterate") {
    auto r = banach_mazur_to_ball(ball(1.0, g));
    CHECK(r.iterations == 0);
    CHECK(r.value <= 1.0 + 1e-12);
  }
  SUBCASE("ellipsoids reach unity") {
    auto E = ellipsoid(Mat3::diag(1.5, 0.8, 1.0), g);
    CHECK(banach_mazur_to_ball(E).value <= 1.0 + 1e-6);
    auto g3 = default_grid(3);
    auto E3 = ellipsoid(Mat3::diag(1.3, 0.9, 1.1), g3);
    CHECK(banach_mazur_to_ball(E3).value <= 1.0 + 1e-6);
  }
  SUBCASE("translated ellipse reaches unity") {
    auto E = translate(ellipsoid(Mat3::diag(1.2, 0.9, 1.0), g), Vec{0.15, -0.1, 0});
    CHECK(banach_mazur_to_ball(E).value <= 1.0 + 1e-6);
  }
  SUBCASE("symmetric quartic perturbation obeys the curvature-ratio bound") {
    auto K = harmonic_bump(0.05, 4, 0, g);
    auto bm = banach_mazur_to_ball(K);
    double r2 = centro_affine_curvature(K).ratio;
    CHECK(bm.value >= 1.0);
    CHECK(bm.value <= std::sqrt(r2) + 1e-6);
  }
}
