#include <benchmark/benchmark.h>

#include "qcausal/experiments.hpp"
#include "qcausal/wave.hpp"

using namespace qcausal;

namespace {

void BM_BellTrialCentralized(benchmark::State& state) {
  const auto initial = bell_initial_state(0.0, 30.0);
  const auto world = bell_world(SpinPolicy::Uniform, 0.0);
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(run_spin_trial(initial, world, seed++, Runtime::Centralized, refined::SchedulerMode::RoundRobin));
}
BENCHMARK(BM_BellTrialCentralized);

void BM_BellTrialRefined(benchmark::State& state) {
  const auto initial = bell_initial_state(0.0, 30.0);
  const auto world = bell_world(SpinPolicy::Uniform, 0.0);
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(run_spin_trial(initial, world, seed++, Runtime::Refined, refined::SchedulerMode::RoundRobin));
}
BENCHMARK(BM_BellTrialRefined);

void BM_DoubleSlitTrial(benchmark::State& state) {
  DoubleSlitConfig cfg;
  cfg.marker = state.range(0) != 0;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_double_slit_trial(cfg, seed++));
}
BENCHMARK(BM_DoubleSlitTrial)->Arg(0)->Arg(1);

void BM_WaveStep(benchmark::State& state) {
  auto g = wave::make_travelling(wave::gaussian(static_cast<double>(state.range(0)) / 2, 10.0),
                                 static_cast<std::size_t>(state.range(0)), 1.0, 1.0, 0.5);
  for (auto _ : state) {
    g = wave::wave_step(g);
    benchmark::DoNotOptimize(g.psi_now.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WaveStep)->Arg(200)->Arg(4096);

void BM_LhvOracle(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(lhv_oracle({0.0, 30.0, 60.0}, BellForm::Identical));
}
BENCHMARK(BM_LhvOracle);

}  // namespace
BENCHMARK_MAIN();
