// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#include <benchmark/benchmark.h>

#include "vtx/ansatz.hpp"
#include "vtx/evolution.hpp"

using namespace vtx;

namespace {

// Grid side from the argument: L = 6, h = 12 / n.
Grid grid_for(const benchmark::State& st) { return Grid::square(6.0, 12.0 / double(st.range(0))); }

const VortexConfig& vortex_on(const Grid& g) {
  static std::map<int, VortexConfig> cache;
  auto it = cache.find(g.n[0]);
  if (it == cache.end()) it = cache.emplace(g.n[0], solve_vortex({cplx(0.3, 0.1)}, g)).first;
  return it->second;
}

void BM_ScreenedPoisson(benchmark::State& st) {
  Grid g = grid_for(st);
  ScreenedProblem p{ScalarField(g, 1.0), ScalarField(g, 1.0)};
  for (auto _ : st) benchmark::DoNotOptimize(solve_screened(p));
}
BENCHMARK(BM_ScreenedPoisson)->Arg(60)->Arg(120)->Unit(benchmark::kMillisecond);

void BM_SolveVortex(benchmark::State& st) {
  Grid g = grid_for(st);
  for (auto _ : st) benchmark::DoNotOptimize(solve_vortex({cplx(0.3, 0.1)}, g));
}
BENCHMARK(BM_SolveVortex)->Arg(60)->Arg(120)->Unit(benchmark::kMillisecond);

void BM_StaticGradient(benchmark::State& st) {
  Grid g = grid_for(st);
  FieldPair c = lattice_fields(vortex_on(g));
  LatticeMask m = make_mask(g, 1);
  for (auto _ : st) benchmark::DoNotOptimize(static_gradient(c, 1.0, m));
}
BENCHMARK(BM_StaticGradient)->Arg(60)->Arg(120)->Arg(240);

void BM_ApplyL(benchmark::State& st) {
  Grid g = grid_for(st);
  StaticBase b = make_static_base(lattice_fields(vortex_on(g)));
  TangentVector t = b.c;
  for (auto _ : st) benchmark::DoNotOptimize(apply_L(b, t));
}
BENCHMARK(BM_ApplyL)->Arg(60)->Arg(120)->Arg(240);

void BM_ZeroModes(benchmark::State& st) {
  Grid g = grid_for(st);
  for (auto _ : st) benchmark::DoNotOptimize(zero_modes({cplx(0.3, 0.1)}, g));
}
BENCHMARK(BM_ZeroModes)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_LeapfrogStep(benchmark::State& st) {
  Grid g = grid_for(st);
  FieldPair c = lattice_fields(vortex_on(g));
  EvolState s = make_evol_state(c, FieldPair(g));
  double dt = 0.5 * cfl_limit(g);
  for (auto _ : st) leapfrog_step(s, dt);
}
BENCHMARK(BM_LeapfrogStep)->Arg(60)->Arg(120)->Arg(240);

void BM_GeodesicIntegrate(benchmark::State& st) {
  ReducedMetric m = ReducedMetric::read_csv(VTX_BENCH_DATA_DIR "/reduced_metric_h0.1.csv");
  GeodesicState s0{3.0, 0.0, -1.0, 0.0, 0.0};
  for (auto _ : st) benchmark::DoNotOptimize(geodesic_integrate(m, s0, 6.0));
}
BENCHMARK(BM_GeodesicIntegrate)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
