// Serial reference vs OpenMP paths for the data-parallel kernels.
#include <benchmark/benchmark.h>

#include "limitset/estimation.hpp"
#include "limitset/measures.hpp"
#include "limitset/parallel.hpp"
#include "limitset/sampling.hpp"

using namespace limitset;

namespace {

void bench_sample(benchmark::State& state, bool parallel) {
  par::set_enabled(parallel);
  const auto model = ModelSpec::meta_gaussian2(0.5);
  for (auto _ : state) {
    auto c = sample(model, state.range(0), 42);
    benchmark::DoNotOptimize(c.pts.data());
  }
  par::set_enabled(true);
}

void bench_minimize(benchmark::State& state, bool parallel) {
  par::set_enabled(parallel);
  const auto g = GaugeSpec::vine3(1.0, 1.0);
  MinimizeOptions opts;
  opts.grid_points = 65;
  for (auto _ : state) {
    auto region = build_min_face(3, 4.0);
    auto r = minimize(g, region, opts);
    benchmark::DoNotOptimize(r.value);
  }
  par::set_enabled(true);
}

void bench_hausdorff(benchmark::State& state, bool parallel) {
  par::set_enabled(true);
  const auto model = ModelSpec::meta_gaussian2(0.5);
  const auto cloud = scale_cloud(sample(model, state.range(0), 7));
  const auto g = model.gauge();
  const auto mesh = level_set_mesh(g);
  par::set_enabled(parallel);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hausdorff_to_limit_set(cloud, g, mesh));
  }
  par::set_enabled(true);
}

}  // namespace

BENCHMARK_CAPTURE(bench_sample, serial, false)->Arg(1 << 18)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bench_sample, openmp, true)->Arg(1 << 18)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bench_minimize, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bench_minimize, openmp, true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bench_hausdorff, serial, false)->Arg(1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bench_hausdorff, openmp, true)->Arg(1 << 16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
