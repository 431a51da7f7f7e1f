#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "limitset/density.hpp"
#include "limitset/gauge.hpp"
#include "limitset/rng.hpp"
#include "limitset/stats.hpp"

using namespace limitset;

namespace {

double ev(const GaugeSpec& g, std::initializer_list<double> x) {
  std::vector<double> v(x);
  return g(v);
}

std::vector<GaugeSpec> catalog2() {
  return {
      GaugeSpec::gaussian2(0.5),
      GaugeSpec::logistic_gp(0.5),
      GaugeSpec::inverted_logistic(0.5),
      GaugeSpec::inverted_husler_reiss(1.0),
      GaugeSpec::mixture(0.3, 0.6),
      GaugeSpec::triangle(0.4, 0.3),
      GaugeSpec::triangle(0.5),
      GaugeSpec::independence(2),
      GaugeSpec::max_only(2),
  };
}

}  // namespace

TEST_CASE("closed-form evaluations") {
  // bivariate Gaussian form at the diagonal
  auto g = GaugeSpec::gaussian2(0.5);
  CHECK(ev(g, {1.0, 1.0}) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));

  // the sum gauge on the simplex
  auto ind = GaugeSpec::independence(2);
  CHECK(ev(ind, {0.3, 0.7}) == doctest::Approx(1.0).epsilon(1e-15));

  // inverted logistic at the diagonal: 2^theta scaling
  auto il = GaugeSpec::inverted_logistic(0.5);
  CHECK(ev(il, {1.0, 1.0}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

  auto lg = GaugeSpec::logistic_gp(0.5);
  CHECK(ev(lg, {1.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ev(lg, {1.0, 0.0}) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("vine gauge collapses when the second and third coordinates agree") {
  // at x2 = x3 the mixed terms vanish and the value is x2 + (1+gamma) x1;
  // checked against direct evaluation of the full formula on a grid
  for (double gamma : {0.5, 1.0, 2.0}) {
    auto g = GaugeSpec::vine3(1.0, gamma);
    for (int i = 0; i <= 9; ++i) {
      const double x1 = 0.1 + 0.3 * i;
      const double x2 = 0.2 + 0.25 * (9 - i);
      CHECK(ev(g, {x1, x2, x2}) ==
            doctest::Approx(x2 + (1.0 + gamma) * x1).epsilon(1e-13));
    }
  }
}

TEST_CASE("extended values arise only on the degenerate family") {
  auto hr = GaugeSpec::husler_reiss_gp(2);
  CHECK(ev(hr, {1.0, 1.0}) == 1.0);
  CHECK(ev(hr, {1.0, 0.99}) == kInf);
  CHECK(hr.extended_valued());
  CHECK_FALSE(GaugeSpec::gaussian2(0.3).extended_valued());
}

TEST_CASE("homogeneity and dominance on random rays") {
  Rng rng(123);
  for (const auto& g : catalog2()) {
    for (int r = 0; r < 1000; ++r) {
      double x[2] = {3.0 * rng.uniform(), 3.0 * rng.uniform()};
      const double t = 0.05 + 4.0 * rng.uniform();
      const double g1 = g(std::span<const double>(x, 2));
      double tx[2] = {t * x[0], t * x[1]};
      const double g2 = g(std::span<const double>(tx, 2));
      REQUIRE(std::abs(g2 - t * g1) <= 1e-12 * std::max(1.0, std::abs(t * g1)));
      REQUIRE(g1 >= std::max(x[0], x[1]) - 1e-12);
    }
    g.check_invariants();
  }
  // trivariate members
  for (const auto& g : {GaugeSpec::vine3(1.0, 2.0), GaugeSpec::independence(3),
                        GaugeSpec::gaussian(3, {1, .75, .25, .75, 1, .4, .25, .4, 1})}) {
    Rng rng3(7);
    for (int r = 0; r < 1000; ++r) {
      double x[3] = {3 * rng3.uniform(), 3 * rng3.uniform(), 3 * rng3.uniform()};
      const double t = 0.05 + 4.0 * rng3.uniform();
      const double g1 = g(std::span<const double>(x, 3));
      double tx[3] = {t * x[0], t * x[1], t * x[2]};
      REQUIRE(std::abs(g(std::span<const double>(tx, 3)) - t * g1) <=
              1e-12 * std::max(1.0, t * g1));
      REQUIRE(g1 >= std::max({x[0], x[1], x[2]}) - 1e-12);
    }
  }
}

TEST_CASE("gaussian matrix form at d = 2 matches the explicit formula") {
  for (double rho : {0.0, 0.25, 0.5, 0.75, 0.9}) {
    auto g = GaugeSpec::gaussian2(rho);
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
      const double x = 4.0 * rng.uniform(), y = 4.0 * rng.uniform();
      const double direct = (x + y - 2.0 * rho * std::sqrt(x * y)) / (1.0 - rho * rho);
      CHECK(ev(g, {x, y}) == doctest::Approx(direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(GaugeSpec::gaussian2(-0.2), std::invalid_argument);  // catalog excludes rho < 0
  CHECK_THROWS_AS(GaugeSpec::gaussian2(1.0), std::invalid_argument);
  CHECK_THROWS_AS(GaugeSpec::logistic_gp(1.0), std::invalid_argument);
  CHECK_THROWS_AS(GaugeSpec::logistic_gp(0.0), std::invalid_argument);
  CHECK_NOTHROW(GaugeSpec::inverted_logistic(1.0));  // closed endpoint
  CHECK_THROWS_AS(GaugeSpec::triangle(0.4, 0.7), std::invalid_argument);  // theta + mu >= 1
  CHECK_THROWS_AS(GaugeSpec::vine3(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(GaugeSpec::gaussian(2, {1, 0.5, 0.4, 1}), std::invalid_argument);
  auto g = GaugeSpec::gaussian2(0.5);
  double bad[3] = {1, 1, 1};
  CHECK_THROWS_AS(g(std::span<const double>(bad, 3)), std::invalid_argument);
  double neg[2] = {-0.1, 1};
  CHECK_THROWS_AS(g(std::span<const double>(neg, 2)), std::domain_error);
}

TEST_CASE("custom gauges register unverified and verify on checks") {
  auto fn = [](std::span<const double> x) { return x[0] + x[1]; };
  auto g = GaugeSpec::custom(2, fn, "sum");
  CHECK_FALSE(g.verified());
  g.check_invariants();
  CHECK(g.verified());

  auto bad = GaugeSpec::custom(2, [](std::span<const double> x) { return 0.5 * (x[0] + x[1]); },
                               "shrunk");
  CHECK_THROWS_AS(bad.check_invariants(), std::runtime_error);
}

TEST_CASE("json round-trip") {
  for (const auto& g : catalog2()) {
    const auto j = g.to_json();
    const auto back = GaugeSpec::from_json(j);
    Rng rng(3);
    for (int i = 0; i < 64; ++i) {
      double x[2] = {3 * rng.uniform(), 3 * rng.uniform()};
      auto sp = std::span<const double>(x, 2);
      const double a = g(sp), b = back(sp);
      if (std::isfinite(a))
        CHECK(a == doctest::Approx(b).epsilon(1e-15));
      else
        CHECK(b == kInf);
    }
  }
  // composites
  auto mix = GaugeSpec::hw_mix(GaugeSpec::inverted_logistic(0.5), 0.6);
  auto back = GaugeSpec::from_json(mix.to_json());
  CHECK(ev(back, {1.0, 1.0}) == doctest::Approx(ev(mix, {1.0, 1.0})).epsilon(1e-12));
  CHECK_THROWS(GaugeSpec::custom(2, [](std::span<const double>) { return 1.0; }).to_json());
}

TEST_CASE("limit-set volumes against closed forms") {
  // simplex
  CHECK(limit_set_volume(GaugeSpec::independence(2)) == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(limit_set_volume(GaugeSpec::independence(3)) ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-4));
  // unit square / cube
  CHECK(limit_set_volume(GaugeSpec::max_only(2)) == doctest::Approx(1.0).epsilon(1e-6));
  // symmetric pointed set: the density normalization gives |G| = 2 theta - 1.5 theta^2
  for (double th : {0.3, 0.5, 0.8}) {
    CHECK(limit_set_volume(GaugeSpec::triangle(th)) ==
          doctest::Approx(2.0 * th - 1.5 * th * th).epsilon(1e-4));
  }
}

TEST_CASE("density defined by a gauge") {
  // independence: |G| = 1/2, density 1 at the origin
  GaugeDensity d(GaugeSpec::independence(2));
  double origin[2] = {0.0, 0.0};
  CHECK(d.pdf(std::span<const double>(origin, 2)) == doctest::Approx(1.0).epsilon(1e-4));

  // coordinate maximum: density exp(-max)/2
  GaugeDensity m(GaugeSpec::max_only(2));
  double p[2] = {1.0, 0.5};
  CHECK(m.pdf(std::span<const double>(p, 2)) == doctest::Approx(std::exp(-1.0) / 2).epsilon(1e-5));

  CHECK_THROWS_AS(GaugeDensity(GaugeSpec::husler_reiss_gp(2)), std::invalid_argument);
}

TEST_CASE("unit-face excess forms agree with direct evaluation where representable") {
  auto il = GaugeSpec::inverted_logistic(0.4);
  auto ihr = GaugeSpec::inverted_husler_reiss(1.5);
  auto ga = GaugeSpec::gaussian2(0.6);
  for (double a : {0.9, 0.5, 0.2, 0.05}) {
    CHECK(il.face_excess(0, 1, a) == doctest::Approx(ev(il, {1.0, a}) - 1.0).epsilon(1e-9));
    CHECK(ihr.face_excess(0, 1, a) == doctest::Approx(ev(ihr, {1.0, a}) - 1.0).epsilon(1e-7));
    CHECK(ga.face_excess(0, 1, a) == doctest::Approx(ev(ga, {1.0, a}) - 1.0).epsilon(1e-9));
  }
  // far below machine resolution of g - 1 the analytic form stays positive
  CHECK(ihr.face_excess(0, 1, 1e-6) > 0.0);
}
