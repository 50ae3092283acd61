// Serial reference vs OpenMP Monte Carlo, plus the per-run building blocks.

#include <benchmark/benchmark.h>

#include "certalign/sim.hpp"
#include "certalign/solver.hpp"

using namespace certalign;

namespace {

sim::McOptions all_methods() {
  sim::McOptions opts;
  opts.methods = {sim::Method::Sdp, sim::Method::Voba, sim::Method::Gn};
  return opts;
}

void BM_MonteCarloSerial(benchmark::State& state) {
  const sim::SimConfig cfg;
  const auto opts = all_methods();
  const int runs = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sim::monte_carlo_serial(cfg, runs, opts));
  state.SetItemsProcessed(state.iterations() * runs);
}

void BM_MonteCarloParallel(benchmark::State& state) {
  const sim::SimConfig cfg;
  auto opts = all_methods();
  const int runs = static_cast<int>(state.range(0));
  opts.threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(sim::monte_carlo(cfg, runs, opts));
  state.SetItemsProcessed(state.iterations() * runs);
  state.counters["threads"] = sim::worker_threads(opts.threads);
}

void BM_GenerateDataset(benchmark::State& state) {
  sim::SimConfig cfg;
  for (auto _ : state) {
    ++cfg.seed;
    benchmark::DoNotOptimize(sim::generate_dataset(cfg));
  }
}

void BM_AlignSdp(benchmark::State& state) {
  sim::SimConfig cfg;
  cfg.n_satellites = static_cast<int>(state.range(0));
  const auto gt = sim::generate_dataset(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(align(gt.epochs));
}

}  // namespace

BENCHMARK(BM_MonteCarloSerial)->Arg(50)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MonteCarloParallel)
    ->ArgsProduct({{50}, {1, 2, 4, 0}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
BENCHMARK(BM_GenerateDataset)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_AlignSdp)->Arg(2)->Arg(5)->Arg(8)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
