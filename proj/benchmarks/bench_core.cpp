#include <benchmark/benchmark.h>

#include "solitonlab/halfline_spectral.hpp"
#include "solitonlab/nls_linearized.hpp"
#include "solitonlab/solitons.hpp"
#include "solitonlab/tridiagonal.hpp"
#include "solitonlab/wave_dynamics.hpp"

using namespace solitonlab;

namespace {

ChannelOperator aubin_channel(std::size_t n) {
  const RadialGrid g(50.0, n);
  return ChannelOperator(g, 0, aubin_potential(1.0, g));
}

void BM_SturmCount(benchmark::State& state) {
  const auto op = aubin_channel(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sturm_count(op.matrix(), -1.0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SturmCount)->RangeMultiplier(4)->Range(1000, 64000)->Complexity(benchmark::oN);

void BM_GroundEigenpair(benchmark::State& state) {
  const auto op = aubin_channel(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eigenpair(op, 0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GroundEigenpair)->RangeMultiplier(4)->Range(1000, 64000)->Complexity(benchmark::oN);

void BM_ZeroEnergyDiagnosis(benchmark::State& state) {
  const auto op = aubin_channel(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(zero_energy_diagnosis(op));
}
BENCHMARK(BM_ZeroEnergyDiagnosis)->Arg(4000)->Arg(16000);

void BM_BirmanSchwingerCount(benchmark::State& state) {
  const RadialGrid g(40.0, static_cast<std::size_t>(state.range(0)));
  const auto V = aubin_potential(1.0, g);
  for (auto _ : state) benchmark::DoNotOptimize(birman_schwinger_count(V, 3, g, 1e-3));
}
BENCHMARK(BM_BirmanSchwingerCount)->Arg(200)->Arg(400)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_NlsShooting(benchmark::State& state) {
  const RadialGrid g(40.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(nls_ground_state(1.0, 1.0, 3, g));
}
BENCHMARK(BM_NlsShooting)->Arg(3000)->Arg(12000)->Unit(benchmark::kMillisecond);

void BM_GapScan(benchmark::State& state) {
  const RadialGrid g(40.0, 3000);
  const auto pair = assemble_linearized_pair(nls_ground_state(1.0, 1.0, 3, g), {0, 1});
  for (auto _ : state) benchmark::DoNotOptimize(gap_scan(pair));
}
BENCHMARK(BM_GapScan)->Unit(benchmark::kMillisecond);

void BM_NlwEvolution(benchmark::State& state) {
  // Soliton minus a small bump; cost per unit time on a fixed grid.
  const RadialGrid g(60.0, static_cast<std::size_t>(state.range(0)));
  RadialState s;
  s.grid = g;
  s.frame = Frame::perturbation;
  s.u = sample(g, [](double r) { return -0.01 * std::exp(-r * r); });
  s.u.back() = 0.0;
  s.ut.assign(g.size(), 0.0);
  EvolutionOptions o;
  o.dispersal_window = 1e9;
  for (auto _ : state) benchmark::DoNotOptimize(evolve_nlw(s, 5.0, 0.5 * g.spacing(), o));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_NlwEvolution)->Arg(1200)->Arg(2400)->Arg(4800)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNSquared);

}  // namespace

BENCHMARK_MAIN();
