#include <benchmark/benchmark.h>

#include <vector>

#include "cavity/measure.hpp"

using namespace cavity;

static void BM_CavityRatioBMatching(benchmark::State& state) {
  auto mu = LocalMeasure::b_matching(static_cast<int>(state.range(0)), 2);
  std::vector<double> field(mu.ground_size() - 1, 0.7);
  for (auto _ : state)
    benchmark::DoNotOptimize(cavity_ratio(mu, 0, field));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CavityRatioBMatching)->Arg(3)->Arg(8)->Arg(16);

static void BM_CavityRatioTable(benchmark::State& state) {
  // Generic table path: exchangeable weights forced through full enumeration.
  int n = static_cast<int>(state.range(0));
  std::vector<LocalMeasure::TableEntry> entries;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    LocalMeasure::TableEntry entry;
    for (int e = 0; e < n; ++e)
      if (mask >> e & 1u) entry.subset.push_back(e);
    entry.weight = 1.0 / (1.0 + __builtin_popcount(mask));
    entries.push_back(std::move(entry));
  }
  auto mu = LocalMeasure::table(n, entries);
  std::vector<double> field(n - 1, 0.7);
  for (auto _ : state)
    benchmark::DoNotOptimize(cavity_ratio(mu, 0, field));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CavityRatioTable)->Arg(4)->Arg(8)->Arg(12);

static void BM_GeneratingEval(benchmark::State& state) {
  auto mu = LocalMeasure::b_matching(static_cast<int>(state.range(0)), 3);
  std::vector<double> field(mu.ground_size(), 1.3);
  for (auto _ : state)
    benchmark::DoNotOptimize(generating_eval(mu, field));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_GeneratingEval)->Arg(4)->Arg(10)->Arg(20);

static void BM_RayleighCheck(benchmark::State& state) {
  auto mu = LocalMeasure::b_matching(5, 2);
  for (auto _ : state) {
    CounterRng rng(7);
    benchmark::DoNotOptimize(check_rayleigh_sampled(mu, 10, rng));
  }
}
BENCHMARK(BM_RayleighCheck);

BENCHMARK_MAIN();
