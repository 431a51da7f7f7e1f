#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

// The OpenMP kernels and the serial reference path must produce identical
// bits: chunked RNG streams, per-index writes, and order-independent
// reductions only.

#include "limitset/estimation.hpp"
#include "limitset/measures.hpp"
#include "limitset/parallel.hpp"
#include "limitset/sampling.hpp"

using namespace limitset;

namespace {

struct ParGuard {
  ~ParGuard() { par::set_enabled(true); }
};

}  // namespace

TEST_CASE("sampling is identical with and without threads") {
  ParGuard guard;
  for (const auto& m :
       {ModelSpec::meta_gaussian2(0.5), ModelSpec::vine3(1.0, 1.0),
        ModelSpec::hw_spatial_mix(ModelSpec::inverted_logistic(0.5), 0.5),
        ModelSpec::density_from_gauge(GaugeSpec::triangle(0.5))}) {
    par::set_enabled(true);
    const auto a = sample(m, 50000, 3);
    par::set_enabled(false);
    const auto b = sample(m, 50000, 3);
    REQUIRE(a.pts == b.pts);
  }
}

TEST_CASE("boundary minimization is identical with and without threads") {
  ParGuard guard;
  const auto g = GaugeSpec::vine3(1.0, 1.0);
  auto region = build_omega_boundary(std::vector<double>{0.2, 0.3, 0.5}, 3.0);
  MinimizeOptions opts;
  opts.grid_points = 65;
  par::set_enabled(true);
  const auto a = minimize(g, region, opts);
  par::set_enabled(false);
  const auto b = minimize(g, region, opts);
  CHECK(a.value == b.value);
  CHECK(a.argmin == b.argmin);
  CHECK(a.face_index == b.face_index);
}

TEST_CASE("hausdorff distance is identical with and without threads") {
  ParGuard guard;
  const auto model = ModelSpec::meta_gaussian2(0.5);
  const auto g = model.gauge();
  const auto mesh = level_set_mesh(g);
  par::set_enabled(true);
  const auto cloud = scale_cloud(sample(model, 30000, 5));
  const double a = hausdorff_to_limit_set(cloud, g, mesh);
  par::set_enabled(false);
  const double b = hausdorff_to_limit_set(cloud, g, mesh);
  CHECK(a == b);
}

TEST_CASE("bootstrap errors are identical with and without threads") {
  ParGuard guard;
  par::set_enabled(true);
  ModelSpec m = ModelSpec::meta_gaussian2(0.5);
  m.margins = Margins::Pareto;
  const auto cloud = sample(m, 50000, 7);
  EstimatorConfig cfg;
  cfg.bootstrap = 32;
  const auto a = hill_eta(cloud, {0, 1}, cfg);
  par::set_enabled(false);
  const auto b = hill_eta(cloud, {0, 1}, cfg);
  CHECK(a.raw == b.raw);
  CHECK(a.se == b.se);
}
