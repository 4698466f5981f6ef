#include <benchmark/benchmark.h>

#include "cavity/ensembles.hpp"
#include "cavity/solver.hpp"

using namespace cavity;

static void BM_CavitySweep(benchmark::State& state) {
  auto net = erdos_renyi(static_cast<int>(state.range(0)), 3.0, 42, 2);
  Configuration x(net.n_arcs(), 0.5);
  for (auto _ : state)
    benchmark::DoNotOptimize(x = cavity_update(net, x, 1.0));
  state.SetItemsProcessed(state.iterations() * net.n_arcs());
}
BENCHMARK(BM_CavitySweep)->Arg(200)->Arg(2000)->Arg(20000);

static void BM_SolveCavity(benchmark::State& state) {
  auto net = erdos_renyi(static_cast<int>(state.range(0)), 3.0, 42, 2);
  SolveOptions opts;
  opts.tol = 1e-10;
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_cavity(net, 1.0, opts));
}
BENCHMARK(BM_SolveCavity)->Arg(200)->Arg(2000);

static void BM_SolveInfiniteActivity(benchmark::State& state) {
  auto net = erdos_renyi(static_cast<int>(state.range(0)), 2.0, 42, 1);
  SolveOptions opts;
  opts.max_iters = 500;
  opts.tol = 1e-7;
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_infinite_activity(net, opts));
}
BENCHMARK(BM_SolveInfiniteActivity)->Arg(200)->Arg(2000);

static void BM_FreeEntropy(benchmark::State& state) {
  auto net = erdos_renyi(200, 3.0, 42, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(free_entropy(net, 1.0, 1e-8));
}
BENCHMARK(BM_FreeEntropy);

BENCHMARK_MAIN();
