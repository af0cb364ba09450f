#include "ppfe/harness.hpp"

#include <benchmark/benchmark.h>

namespace {

ppfe::Scenario bench_scenario() {
  ppfe::Scenario sc = ppfe::scenario_preset("three-tank-groupA1");
  sc.trials = 64;
  sc.horizon = 200;
  sc.seed = 11;
  return sc;
}

void BM_MonteCarloSerial(benchmark::State& state) {
  const ppfe::Scenario sc = bench_scenario();
  for (auto _ : state) {
    auto r = ppfe::run_monte_carlo_serial(sc, false);
    benchmark::DoNotOptimize(r.mse_legit.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(sc.trials));
}
BENCHMARK(BM_MonteCarloSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_MonteCarloParallel(benchmark::State& state) {
  const ppfe::Scenario sc = bench_scenario();
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto r = ppfe::run_monte_carlo(sc, {workers, false});
    benchmark::DoNotOptimize(r.mse_legit.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(sc.trials));
}
BENCHMARK(BM_MonteCarloParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_BoundIteration(benchmark::State& state) {
  const ppfe::Scenario sc = bench_scenario();
  for (auto _ : state) {
    auto seq = ppfe::scenario_bound(sc);
    benchmark::DoNotOptimize(seq.iterates.data());
  }
}
BENCHMARK(BM_BoundIteration)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
