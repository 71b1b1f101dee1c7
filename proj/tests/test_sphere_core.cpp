#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "lpstab/constants.hpp"
#include "lpstab/sphere_grid.hpp"
#include "oracles.hpp"

using namespace lpstab;

namespace {

Spectrum random_spectrum(int dim, int degree, unsigned seed, double amp = 0.3) {
  std::mt19937_64 rng(seed);
  Spectrum s = Spectrum::zero(dim, degree);
  for (auto& c : s.c) c = amp * (2.0 * oracles::u01(rng) - 1.0);
  return s;
}

}  // namespace

TEST_CASE("grid construction and weights") {
  auto g2 = SphereGrid::make(2, {256});
  CHECK(g2->node_count() == 256);
  for (double w : g2->weights()) CHECK(w == doctest::Approx(2.0 * kPi / 256).epsilon(1e-15));
  CHECK(std::abs(g2->integrate(std::vector<double>(256, 1.0)) - 2.0 * kPi) < 1e-10);

  auto g3 = SphereGrid::make(3, {32, 64});
  CHECK(std::abs(g3->integrate(std::vector<double>(g3->node_count(), 1.0)) - 4.0 * kPi) < 1e-10);

  CHECK_THROWS_AS(SphereGrid::make(3, {7, 64}), GridError);
  CHECK_THROWS_AS(SphereGrid::make(2, {255}), GridError);
  CHECK_THROWS_AS(SphereGrid::make(3, {32, 63}), GridError);
  CHECK_THROWS_AS(SphereGrid::make(4, {16, 32}), GridError);
  CHECK_THROWS_AS(SphereGrid::make(2, {8}), GridError);
}

TEST_CASE("node invariants: unit norm and antipodal closure") {
  for (auto g : {SphereGrid::make(2, {512}), SphereGrid::make(3, {48, 96})}) {
    for (int k = 0; k < g->node_count(); ++k) {
      CHECK(std::abs(norm(g->nodes()[k]) - 1.0) < 1e-14);
      Vec s = g->nodes()[k] + g->nodes()[g->antipode_index(k)];
      CHECK(norm(s) < 1e-14);
      CHECK(g->weights()[k] == doctest::Approx(g->weights()[g->antipode_index(k)]));
    }
  }
}

TEST_CASE("quadrature of (u.v)^2 and odd integrands") {
  std::mt19937_64 rng(7);
  for (auto g : {SphereGrid::make(2, {512}), SphereGrid::make(3, {48, 96})}) {
    int n = g->dim();
    for (int rep = 0; rep < 4; ++rep) {
      Vec v{2.0 * oracles::u01(rng) - 1.0, 2.0 * oracles::u01(rng) - 1.0,
            n == 3 ? 2.0 * oracles::u01(rng) - 1.0 : 0.0};
      v = normalized(v);
      std::vector<double> sq(g->node_count()), lin(g->node_count());
      for (int k = 0; k < g->node_count(); ++k) {
        double d = dot(g->nodes()[k], v);
        sq[k] = d * d;
        lin[k] = d;
      }
      CHECK(std::abs(g->integrate(sq) - sphere_surface(n) / n) < 1e-10);
      CHECK(std::abs(g->integrate(lin)) < 1e-12);
    }
  }
}

TEST_CASE("integrate is linear") {
  auto g = SphereGrid::make(3, {48, 96});
  std::mt19937_64 rng(11);
  std::vector<double> f(g->node_count()), h(g->node_count());
  for (auto& x : f) x = 2.0 * oracles::u01(rng) - 1.0;
  for (auto& x : h) x = 2.0 * oracles::u01(rng) - 1.0;
  double alpha = 1.7, beta = -0.3;
  std::vector<double> mix(g->node_count());
  for (int k = 0; k < g->node_count(); ++k) mix[k] = alpha * f[k] + beta * h[k];
  double err = std::abs(g->integrate(mix) - alpha * g->integrate(f) - beta * g->integrate(h));
  CHECK(err < 1e-12 * (std::abs(alpha) + std::abs(beta)));
}

TEST_CASE("antipodal reflection preserves the integral") {
  for (auto g : {SphereGrid::make(2, {512}), SphereGrid::make(3, {48, 96})}) {
    std::mt19937_64 rng(13);
    std::vector<double> f(g->node_count()), r(g->node_count());
    for (auto& x : f) x = oracles::u01(rng);
    for (int k = 0; k < g->node_count(); ++k) r[g->antipode_index(k)] = f[k];
    CHECK(std::abs(g->integrate(f) - g->integrate(r)) < 1e-12);
  }
}

TEST_CASE("analyze/synthesize round trip against direct summation") {
  SUBCASE("plane") {
    auto g = SphereGrid::make(2, {512});
    Spectrum s = random_spectrum(2, 17, 101);
    auto vals = g->synthesize(s);
    // direct-summation oracle at every 13th node
    for (int k = 0; k < g->node_count(); k += 13) {
      double theta = std::atan2(g->nodes()[k][1], g->nodes()[k][0]);
      CHECK(vals[k] == doctest::Approx(oracles::direct_eval(s, theta)).epsilon(1e-12));
    }
    Spectrum back = g->analyze(vals, s.degree);
    auto vals2 = g->synthesize(back);
    for (int k = 0; k < g->node_count(); ++k) CHECK(std::abs(vals[k] - vals2[k]) < 1e-10);
  }
  SUBCASE("sphere") {
    auto g = SphereGrid::make(3, {48, 96});
    Spectrum s = random_spectrum(3, 20, 202);
    auto vals = g->synthesize(s);
    for (int k = 0; k < g->node_count(); k += 97) {
      const Vec& u = g->nodes()[k];
      double theta = std::acos(u[2]), phi = std::atan2(u[1], u[0]);
      CHECK(vals[k] == doctest::Approx(oracles::direct_eval(s, theta, phi)).epsilon(1e-11));
    }
    Spectrum back = g->analyze(vals, s.degree);
    auto vals2 = g->synthesize(back);
    for (int k = 0; k < g->node_count(); ++k) CHECK(std::abs(vals[k] - vals2[k]) < 1e-10);
  }
}

TEST_CASE("evaluate_at matches node synthesis and handles edge cases") {
  auto g = SphereGrid::make(3, {48, 96});
  Spectrum s = random_spectrum(3, 12, 33);
  auto vals = g->synthesize(s);
  for (int k = 0; k < g->node_count(); k += 211)
    CHECK(std::abs(evaluate_at(s, g->nodes()[k]) - vals[k]) < 1e-12);

  Spectrum one = Spectrum::zero(3, 0);
  one.c[0] = std::sqrt(4.0 * kPi);
  CHECK(evaluate_at(one, normalized(Vec{0.3, -0.8, 0.5})) == doctest::Approx(1.0).epsilon(1e-14));

  // n=2: cos(3 theta) at theta = pi/6 vanishes
  Spectrum c3 = Spectrum::zero(2, 3);
  c3.c[5] = 1.0;
  CHECK(std::abs(evaluate_at(c3, direction2(kPi / 6.0))) < 1e-12);

  CHECK_THROWS_AS(evaluate_at(s, Vec{1.0, 1e-5, 0.0}), GridError);
  CHECK_THROWS_AS(SphereGrid::make(2, {64})->analyze(std::vector<double>(64, 1.0), 40),
                  GridError);
}

TEST_CASE("quadrature integrates basis functions exactly") {
  auto g = SphereGrid::make(3, {48, 96});
  for (int l : {1, 5, 17, 33, 47})
    for (int m : {-l, -l / 2, 0, l / 2, l}) {
      Spectrum s = Spectrum::zero(3, l);
      s.c[Spectrum::sph_index(l, m)] = 1.0;
      CHECK(std::abs(g->integrate(g->synthesize(s))) < 1e-10);
    }
}

TEST_CASE("covariant hessian") {
  SUBCASE("constant field has zero hessian") {
    auto g = SphereGrid::make(3, {48, 96});
    Spectrum one = Spectrum::zero(3, 0);
    one.c[0] = std::sqrt(4.0 * kPi);
    HessianField h = covariant_hessian(synthesize_field(g, one));
    for (int k = 0; k < g->node_count(); ++k) {
      CHECK(std::abs(h.h11[k]) < 1e-12);
      CHECK(std::abs(h.h12[k]) < 1e-12);
      CHECK(std::abs(h.h22[k]) < 1e-12);
    }
  }
  SUBCASE("linear restrictions lie in the kernel of hess + g") {
    auto g = SphereGrid::make(3, {48, 96});
    Spectrum lin = Spectrum::zero(3, 1);
    double k1 = std::sqrt(4.0 * kPi / 3.0);
    lin.c[Spectrum::sph_index(1, 1)] = 0.4 * k1;
    lin.c[Spectrum::sph_index(1, -1)] = -0.7 * k1;
    lin.c[Spectrum::sph_index(1, 0)] = 0.2 * k1;
    ScalarField f = synthesize_field(g, lin);
    HessianField h = covariant_hessian(f);
    for (int k = 0; k < g->node_count(); ++k) {
      CHECK(std::abs(h.h11[k] + f.values[k]) < 1e-9);
      CHECK(std::abs(h.h12[k]) < 1e-9);
      CHECK(std::abs(h.h22[k] + f.values[k]) < 1e-9);
    }
  }
  SUBCASE("ellipse second derivative matches dense finite differences") {
    auto g = SphereGrid::make(2, {512});
    std::vector<double> vals(g->node_count());
    for (int k = 0; k < g->node_count(); ++k) {
      const Vec& u = g->nodes()[k];
      vals[k] = std::sqrt(1.5 * 1.5 * u[0] * u[0] + u[1] * u[1]);
    }
    Spectrum s = g->analyze(vals);
    ScalarField f = synthesize_field(g, s);
    HessianField h = covariant_hessian(f);
    // oracle step = a tenth of the grid spacing
    double step = 2.0 * kPi / 512.0 / 10.0;
    for (int k = 0; k < g->node_count(); k += 7) {
      double theta = 2.0 * kPi * k / 512.0;
      double fd = oracles::fd_second_derivative(s, theta, step);
      CHECK(std::abs((h.h11[k] + f.values[k]) - (fd + f.values[k])) < 1e-7);
    }
  }
  SUBCASE("missing spectrum is an error") {
    auto g = SphereGrid::make(2, {64});
    ScalarField f = make_field(g, std::vector<double>(64, 1.0));
    CHECK_THROWS_AS(covariant_hessian(f), GridError);
  }
}

TEST_CASE("field/grid mismatch") {
  auto g = SphereGrid::make(2, {64});
  CHECK_THROWS_AS(g->integrate(std::vector<double>(63, 1.0)), GridError);
  Spectrum big = Spectrum::zero(2, 100);
  CHECK_THROWS_AS(g->synthesize(big), GridError);
}
