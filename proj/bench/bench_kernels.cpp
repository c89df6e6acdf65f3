// Serial reference vs OpenMP kernels. Arg(0) = serial, Arg(1) = parallel.
#include <benchmark/benchmark.h>

#include "cavityfock/measurement.hpp"
#include "cavityfock/trapping.hpp"

using namespace cavityfock;

namespace {

Execution mode(const benchmark::State& state) { return state.range(0) == 0 ? Execution::serial : Execution::parallel; }

void BM_NumericFilter(benchmark::State& state) {
  const auto params = DKParams::from_dimensionless(0.5, 1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(numeric_filter(params, AtomCase::a, 30, {}, mode(state)));
}

void BM_BruteForceEnsemble(benchmark::State& state) {
  const auto d0 = make_distribution({CoherentState{2.0}});
  const FilterTable f = resonant_filter(1.0, d0.nmax() + 15);
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_ensemble(d0, f, AtomCase::a, 14, mode(state)));
}

void BM_NoisySchedule(benchmark::State& state) {
  const auto d0 = make_distribution({CoherentState{4.0}});
  const Schedule schedule = make_schedule_fixed(10, 1, 150);
  for (auto _ : state)
    benchmark::DoNotOptimize(run_schedule(d0, schedule, AtomCase::a, {0.02, 0}, 10, 200, mode(state)));
}

void BM_SampleTrajectories(benchmark::State& state) {
  const auto d0 = make_distribution({CoherentState{2.0}});
  const std::vector<FilterTable> filters{resonant_filter(1.0, d0.nmax() + 11)};
  const std::vector<AtomCase> cases{AtomCase::a};
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_trajectories(d0, filters, cases, 10, 20000, 0, mode(state)));
}

}  // namespace

BENCHMARK(BM_NumericFilter)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BruteForceEnsemble)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NoisySchedule)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleTrajectories)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
