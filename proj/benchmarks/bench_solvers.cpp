#include <benchmark/benchmark.h>

#include "mincap/mincap.hpp"

using namespace mincap;

namespace {

const WarpedManifold& wavy() {
  static const WarpedManifold m(3, make_expression_warp("r*(1.5+sin(r))"));
  return m;
}

void BM_Shooting(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(minimal_capacity(wavy(), 0.5, 6.0, 0.7).value);
}
BENCHMARK(BM_Shooting)->Unit(benchmark::kMicrosecond);

void BM_Discrete(benchmark::State& state) {
  const auto grid = make_grid(0.5, 6.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(discrete_minimize(wavy(), grid, 0.7, false).result.value);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Discrete)->RangeMultiplier(4)->Range(125, 8000)->Unit(benchmark::kMillisecond)->Complexity();

void BM_MeshSolve(benchmark::State& state) {
  auto mesh = polar_annulus(1, 10, 8, 40);
  for (int i = 0; i < state.range(0); ++i) mesh = refine(mesh);
  for (auto _ : state) benchmark::DoNotOptimize(solve(mesh, 0.1, MeshMode::Dirichlet).J);
  state.counters["triangles"] = static_cast<double>(mesh.triangles.size());
}
BENCHMARK(BM_MeshSolve)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_Classify(benchmark::State& state) {
  const auto m = build(parse_example_id(state.range(0) == 0 ? "flat3" : "prop2_6_n3"));
  for (auto _ : state) benchmark::DoNotOptimize(classify(m).parabolicity);
}
BENCHMARK(BM_Classify)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_StaircaseReproduction(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(staircase_reproduction(5, 14, 2, true).cap);
}
BENCHMARK(BM_StaircaseReproduction)->Unit(benchmark::kMillisecond);

void BM_GaussKronrod(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(quad::gauss_kronrod([](double x) { return 1e-4 / (x * x + 1e-8); }, -1, 1, 1e-12));
}
BENCHMARK(BM_GaussKronrod);

}  // namespace
