#include <benchmark/benchmark.h>

#include "cavity/analytic.hpp"
#include "cavity/rde.hpp"

using namespace cavity;

static void BM_RdeIteration(benchmark::State& state) {
  auto pi = DegreeDistribution::poisson_truncated(2.0);
  RdeOptions opts;
  opts.pool_size = static_cast<std::size_t>(state.range(0));
  opts.max_iters = 10;
  opts.stop_at_noise_floor = false;
  opts.seed = 3;
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_rde(pi, 1, 0.5, opts));
  state.SetItemsProcessed(state.iterations() * opts.pool_size * opts.max_iters);
}
BENCHMARK(BM_RdeIteration)->Arg(10000)->Arg(100000);

static void BM_SizeDensityOf(benchmark::State& state) {
  auto pi = DegreeDistribution::poisson_truncated(2.0);
  RdeOptions opts;
  opts.pool_size = 10000;
  opts.max_iters = 20;
  opts.stop_at_noise_floor = false;
  opts.seed = 3;
  auto run = solve_rde(pi, 1, 0.5, opts);
  for (auto _ : state)
    benchmark::DoNotOptimize(size_density_of(run.final_pool, pi, 1, 10000, 9));
}
BENCHMARK(BM_SizeDensityOf);

static void BM_HistoricalMinima(benchmark::State& state) {
  LimitSpec spec{DegreeDistribution::poisson_truncated(2.0), 2};
  for (auto _ : state)
    benchmark::DoNotOptimize(historical_minima(spec));
}
BENCHMARK(BM_HistoricalMinima);

BENCHMARK_MAIN();
