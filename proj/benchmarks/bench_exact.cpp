#include <benchmark/benchmark.h>

#include <utility>
#include <vector>

#include "cavity/ensembles.hpp"
#include "cavity/exact.hpp"
#include "cavity/network.hpp"

using namespace cavity;

namespace {

// Ring of n vertices plus chords: dense enough that pruning matters.
Network ring_with_chords(int n, int chords, int b) {
  std::vector<std::pair<int, int>> edges;
  for (int v = 0; v < n; ++v) edges.emplace_back(std::min(v, (v + 1) % n),
                                                 std::max(v, (v + 1) % n));
  for (int k = 0; k < chords; ++k) {
    int u = k;
    int w = (k + n / 2) % n;
    if (u > w) std::swap(u, w);
    edges.emplace_back(u, w);
  }
  std::vector<int> degree(n, 0);
  for (const auto& e : edges) {
    ++degree[e.first];
    ++degree[e.second];
  }
  std::vector<LocalMeasure> measures;
  for (int v = 0; v < n; ++v)
    measures.push_back(LocalMeasure::b_matching(degree[v], b));
  return Network(n, std::move(edges), std::move(measures));
}

}  // namespace

static void BM_PartitionPolynomial(benchmark::State& state) {
  auto net = ring_with_chords(static_cast<int>(state.range(0)), 4, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(partition_polynomial(net));
  state.counters["edges"] = static_cast<double>(net.n_edges());
}
BENCHMARK(BM_PartitionPolynomial)->Arg(12)->Arg(16)->Arg(20);

static void BM_ExactMarginals(benchmark::State& state) {
  auto net = ring_with_chords(12, 4, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(exact_all_marginals(net, 1.0));
}
BENCHMARK(BM_ExactMarginals);

BENCHMARK_MAIN();
