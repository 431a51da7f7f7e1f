#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "limitset/density.hpp"
#include "limitset/sampling.hpp"
#include "limitset/stats.hpp"

using namespace limitset;

namespace {

// KS p-value of one margin against exact Exp(1).
double margin_ks_exp(const SampleCloud& c, int coord) {
  std::vector<double> u(c.n);
  for (std::int64_t i = 0; i < c.n; ++i) u[i] = -std::expm1(-c.row(i)[coord]);
  const double d = ks_statistic_from_uniforms(std::move(u));
  return ks_pvalue(d, static_cast<std::size_t>(c.n));
}

double margin_ks_sf(const SampleCloud& c, int coord,
                    const std::function<double(double)>& sf) {
  std::vector<double> u(c.n);
  for (std::int64_t i = 0; i < c.n; ++i) u[i] = 1.0 - sf(c.row(i)[coord]);
  const double d = ks_statistic_from_uniforms(std::move(u));
  return ks_pvalue(d, static_cast<std::size_t>(c.n));
}

constexpr std::int64_t kN = 100000;
constexpr std::uint64_t kSeed = 20240811;

}  // namespace

TEST_CASE("reproducibility is bit-exact") {
  const auto m = ModelSpec::meta_gaussian2(0.5);
  const auto a = sample(m, 20000, 7);
  const auto b = sample(m, 20000, 7);
  REQUIRE(a.pts == b.pts);
  const auto c = sample(m, 20000, 8);
  CHECK(a.pts != c.pts);
}

TEST_CASE("margins pass the KS check at the 1% level") {
  struct Case {
    const char* name;
    ModelSpec model;
  };
  const std::vector<Case> cases = {
      {"meta_gaussian(0.5)", ModelSpec::meta_gaussian2(0.5)},
      {"meta_gaussian(-0.5)", ModelSpec::meta_gaussian2(-0.5)},
      {"logistic_gp(0.5)", ModelSpec::logistic_gp(0.5)},
      {"logistic_gp(0.3)", ModelSpec::logistic_gp(0.3)},
      {"inverted_logistic(0.5)", ModelSpec::inverted_logistic(0.5)},
      {"inverted_logistic(0.7, d3)", ModelSpec::inverted_logistic(0.7, 3)},
      {"inverted_husler_reiss(1)", ModelSpec::inverted_husler_reiss(1.0)},
      {"vine3(1,1)", ModelSpec::vine3(1.0, 1.0)},
      {"hw_mix(invlog .5, .5)",
       ModelSpec::hw_spatial_mix(ModelSpec::inverted_logistic(0.5), 0.5)},
      {"husler_reiss_gp(1)", ModelSpec::husler_reiss_gp(1.0)},
  };
  for (const auto& [name, model] : cases) {
    CAPTURE(name);
    const auto c = sample(model, kN, kSeed);
    for (int j = 0; j < c.dim; ++j) {
      CAPTURE(j);
      REQUIRE(margin_ks_exp(c, j) > 0.01);
    }
  }
}

TEST_CASE("pareto margins via the exponential map") {
  const auto c = sample(ModelSpec::inverted_logistic(0.5), kN, 3);
  const auto p = to_pareto(c);
  REQUIRE(p.margins == Margins::Pareto);
  std::vector<double> u(p.n);
  for (std::int64_t i = 0; i < p.n; ++i) {
    REQUIRE(p.pts[i * 2] >= 1.0);
    u[i] = 1.0 - 1.0 / p.row(i)[0];
  }
  CHECK(ks_pvalue(ks_statistic_from_uniforms(std::move(u)), p.n) > 0.01);
}

TEST_CASE("density sampler: product case matches independent exponentials") {
  const auto rep = density_from_gauge_sample(GaugeSpec::independence(2), kN, kSeed);
  for (int j = 0; j < 2; ++j) REQUIRE(margin_ks_exp(rep.cloud, j) > 0.01);
  // acceptance ratio against the normalizing volume; both routes estimate
  // d!|G|/d^d
  CHECK(rep.acceptance == doctest::Approx(rep.expected_acceptance).epsilon(0.01));
  // coordinates uncorrelated
  double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  for (std::int64_t i = 0; i < rep.cloud.n; ++i) {
    const auto r = rep.cloud.row(i);
    sx += r[0];
    sy += r[1];
    sxy += r[0] * r[1];
    sxx += r[0] * r[0];
    syy += r[1] * r[1];
  }
  const double n = static_cast<double>(rep.cloud.n);
  const double corr = (sxy / n - sx / n * sy / n) /
                      std::sqrt((sxx / n - sx * sx / n / n) * (syy / n - sy * sy / n / n));
  CHECK(std::abs(corr) < 0.02);
}

TEST_CASE("density sampler: pointed gauge margins and volume cross-check") {
  const auto g = GaugeSpec::triangle(0.5);
  const auto rep = density_from_gauge_sample(g, kN, kSeed);
  // closed-form margin of the density model
  for (int j = 0; j < 2; ++j)
    REQUIRE(margin_ks_sf(rep.cloud, j, [&](double x) { return density_margin_sf(g, x); }) >
            0.01);
  // two independent volume estimates agree to 1%
  const double vol_quadrature = limit_set_volume(g);
  const double vol_rejection = rep.acceptance * 4.0 / 2.0;
  CHECK(vol_quadrature == doctest::Approx(vol_rejection).epsilon(0.01));
}

TEST_CASE("mixture margins follow the closed-form survival") {
  // the exported cloud has exact exponential margins precisely because the
  // margin map inverts the closed-form convolution survival
  const double gamma = 0.5;
  auto inner = ModelSpec::inverted_logistic(0.5);
  const auto mixed = sample(ModelSpec::hw_spatial_mix(inner, gamma), kN, 5);
  for (int j = 0; j < 2; ++j) REQUIRE(margin_ks_exp(mixed, j) > 0.01);
  // and the survival function itself is a proper tail
  CHECK(hw_mix_margin_sf(0.0, gamma) == doctest::Approx(1.0));
  CHECK(hw_mix_margin_sf(3.0, gamma) < hw_mix_margin_sf(2.0, gamma));
}

TEST_CASE("cloud scaling") {
  const auto c = sample(ModelSpec::meta_gaussian2(0.5), 10000, 11);
  const auto s = scale_cloud(c);
  CHECK(s.r_n == doctest::Approx(std::log(10000.0)));
  CHECK(s.pts[0] == doctest::Approx(c.pts[0] / std::log(10000.0)));
  CHECK_FALSE(s.log_transformed);

  const auto p = to_pareto(c);
  const auto sp = scale_cloud(p);
  CHECK(sp.log_transformed);
  CHECK(sp.pts[0] == doctest::Approx(s.pts[0]).epsilon(1e-12));

  SampleCloud tiny;
  tiny.n = 1;
  tiny.dim = 1;
  tiny.pts = {1.0};
  CHECK_THROWS_AS(scale_cloud(tiny), std::invalid_argument);
}

TEST_CASE("model descriptors round-trip") {
  const std::vector<ModelSpec> models = {
      ModelSpec::meta_gaussian2(0.5),
      ModelSpec::logistic_gp(0.4),
      ModelSpec::inverted_logistic(0.6, 3),
      ModelSpec::inverted_husler_reiss(2.0),
      ModelSpec::vine3(1.5, 0.5),
      ModelSpec::density_from_gauge(GaugeSpec::triangle(0.5)),
      ModelSpec::hw_spatial_mix(ModelSpec::inverted_logistic(0.5), 0.7),
      ModelSpec::husler_reiss_gp(1.0),
  };
  for (const auto& m : models) {
    const auto back = ModelSpec::from_json(m.to_json());
    CHECK(back.to_json() == m.to_json());
    // same stream, same cloud
    const auto a = sample(m, 4096, 9);
    const auto b = sample(back, 4096, 9);
    CHECK(a.pts == b.pts);
  }
}

TEST_CASE("boundary case: unit-square gauge is asymptotically independent") {
  // despite eta = 1 the conditional exceedance ratio drains to zero
  const auto rep = density_from_gauge_sample(GaugeSpec::max_only(2), 1000000, kSeed);
  auto ratio = [&](double t) {
    std::int64_t both = 0, one = 0;
    for (std::int64_t i = 0; i < rep.cloud.n; ++i) {
      const auto r = rep.cloud.row(i);
      if (r[0] > t) ++one;
      if (r[0] > t && r[1] > t) ++both;
    }
    return one > 0 ? static_cast<double>(both) / one : 0.0;
  };
  const double r4 = ratio(4.0), r10 = ratio(10.0);
  CHECK(r10 < r4);
  CHECK(r10 < 0.25);  // 1/(1 + t/2) at t = 10 is about 0.17
}
