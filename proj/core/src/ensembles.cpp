#include "cavity/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

#include "cavity/measure.hpp"
#include "cavity/numeric.hpp"

namespace cavity {

namespace {

// Salts for deriving independent streams from one user seed.
constexpr std::uint64_t kSaltDegrees = 0x6465677265657371ull;
constexpr std::uint64_t kSaltPairing = 0x70616972696e6773ull;
constexpr std::uint64_t kSaltEdges = 0x65646765736b6970ull;
constexpr std::uint64_t kSaltParity = 0x7061726974796669ull;

std::vector<LocalMeasure> capacity_measures(const std::vector<int>& degrees,
                                            int b) {
  if (b < 1) throw std::invalid_argument("capacity must be at least 1");
  std::vector<LocalMeasure> measures;
  measures.reserve(degrees.size());
  for (int d : degrees) measures.push_back(LocalMeasure::b_matching(d, b));
  return measures;
}

// Pair shuffled stubs, erase self-loops and duplicates, return simple edges.
std::vector<std::pair<int, int>> pair_stubs(const std::vector<int>& degrees,
                             std::uint64_t seed, PairingStats* stats) {
  std::size_t total = 0;
  for (int d : degrees) {
    if (d < 0) throw std::invalid_argument("negative degree");
    total += static_cast<std::size_t>(d);
  }
  if (total % 2 != 0)
    throw std::invalid_argument("degree sequence has odd sum");

  std::vector<int> stubs;
  stubs.reserve(total);
  for (std::size_t v = 0; v < degrees.size(); ++v)
    for (int k = 0; k < degrees[v]; ++k) stubs.push_back(static_cast<int>(v));

  CounterRng rng(CounterRng::derive(seed, kSaltPairing));
  for (std::size_t i = stubs.size(); i > 1; --i)
    std::swap(stubs[i - 1], stubs[rng.below(i)]);

  std::vector<std::pair<int, int>> edges;
  edges.reserve(total / 2);
  int self_loops = 0;
  for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
    int u = stubs[i];
    int v = stubs[i + 1];
    if (u == v) {
      ++self_loops;
      continue;
    }
    edges.push_back({std::min(u, v), std::max(u, v)});
  }
  std::sort(edges.begin(), edges.end());
  std::size_t before = edges.size();
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  if (stats) {
    stats->self_loops_removed = self_loops;
    stats->parallel_removed = static_cast<int>(before - edges.size());
  }
  return edges;
}

Network network_from_edges(int n, std::vector<std::pair<int, int>> edges,
                           int b) {
  std::vector<int> degrees(static_cast<std::size_t>(n), 0);
  for (const auto& e : edges) {
    ++degrees[static_cast<std::size_t>(e.first)];
    ++degrees[static_cast<std::size_t>(e.second)];
  }
  return Network(n, std::move(edges), capacity_measures(degrees, b));
}

}  // namespace

DegreeDistribution::DegreeDistribution(std::vector<double> probs)
    : probs_(std::move(probs)) {
  if (probs_.empty()) throw std::invalid_argument("empty degree distribution");
  KahanSum total;
  KahanSum mean;
  for (std::size_t n = 0; n < probs_.size(); ++n) {
    double p = probs_[n];
    if (!(p >= 0.0) || !std::isfinite(p))
      throw std::invalid_argument("degree probabilities must be finite and nonnegative");
    total.add(p);
    mean.add(static_cast<double>(n) * p);
  }
  if (std::abs(total.value() - 1.0) > 1e-12)
    throw std::invalid_argument("degree probabilities must sum to 1 within 1e-12");
  // Remove the residual rounding error so repeated size-biasing stays exact.
  double norm = total.value();
  cdf_.resize(probs_.size());
  double running = 0.0;
  for (std::size_t n = 0; n < probs_.size(); ++n) {
    probs_[n] /= norm;
    running += probs_[n];
    cdf_[n] = running;
  }
  cdf_.back() = 1.0;
  mean_ = mean.value() / norm;
}

DegreeDistribution DegreeDistribution::explicit_probs(
    std::vector<double> probs) {
  return DegreeDistribution(std::move(probs));
}

DegreeDistribution DegreeDistribution::poisson_truncated(double mean,
                                                         int max_degree) {
  if (!(mean >= 0.0) || !std::isfinite(mean))
    throw std::invalid_argument("Poisson mean must be finite and nonnegative");
  if (max_degree < 0) throw std::invalid_argument("max_degree must be >= 0");
  std::vector<double> probs(static_cast<std::size_t>(max_degree) + 1);
  KahanSum total;
  for (int n = 0; n <= max_degree; ++n) {
    double logp = mean > 0.0
                      ? -mean + n * std::log(mean) - std::lgamma(n + 1.0)
                      : (n == 0 ? 0.0 : -kInf);
    probs[static_cast<std::size_t>(n)] = std::exp(logp);
    total.add(probs[static_cast<std::size_t>(n)]);
  }
  for (double& p : probs) p /= total.value();
  return DegreeDistribution(std::move(probs));
}

int DegreeDistribution::sample(CounterRng& rng) const {
  double u = rng.uniform01();
  auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return static_cast<int>(it - cdf_.begin());
}

DegreeDistribution size_biased(const DegreeDistribution& pi) {
  double mean = pi.mean();
  if (!(mean > 0.0))
    throw std::invalid_argument("size-biasing needs a positive mean degree");
  const std::vector<double>& p = pi.probs();
  std::vector<double> biased(p.size() > 1 ? p.size() - 1 : 1, 0.0);
  KahanSum total;
  for (std::size_t n = 0; n + 1 < p.size(); ++n) {
    biased[n] = static_cast<double>(n + 1) * p[n + 1] / mean;
    total.add(biased[n]);
  }
  if (p.size() == 1) {
    // All mass on degree 0 is rejected above (mean 0), unreachable.
    biased[0] = 1.0;
    return DegreeDistribution::explicit_probs(std::move(biased));
  }
  for (double& x : biased) x /= total.value();
  return DegreeDistribution::explicit_probs(std::move(biased));
}

Network erdos_renyi(int n, double c, std::uint64_t seed, int b) {
  if (n < 1) throw std::invalid_argument("need at least one vertex");
  if (!(c >= 0.0) || !std::isfinite(c))
    throw std::invalid_argument("mean degree must be finite and nonnegative");
  double p = std::min(1.0, c / static_cast<double>(n));

  std::vector<std::pair<int, int>> edges;
  std::size_t n_pairs =
      static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
  CounterRng rng(CounterRng::derive(seed, kSaltEdges));
  if (p >= 1.0) {
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) edges.push_back({u, v});
  } else if (p > 0.0) {
    // Skip sampling: jump between successful pairs in lexicographic order.
    double log_q = std::log1p(-p);
    std::size_t idx = 0;
    bool first = true;
    while (true) {
      double u01 = rng.uniform01();
      double jump = std::floor(std::log1p(-u01) / log_q);
      std::size_t step = jump >= static_cast<double>(n_pairs)
                             ? n_pairs
                             : static_cast<std::size_t>(jump);
      idx += step + (first ? 0 : 1);
      first = false;
      if (idx >= n_pairs) break;
      // Decode the linear index into an ordered pair.
      std::size_t rem = idx;
      int u = 0;
      while (rem >= static_cast<std::size_t>(n - 1 - u)) {
        rem -= static_cast<std::size_t>(n - 1 - u);
        ++u;
      }
      int v = u + 1 + static_cast<int>(rem);
      edges.push_back({u, v});
    }
  }
  return network_from_edges(n, std::move(edges), b);
}

Network random_regular(int n, int d, std::uint64_t seed, int b,
                       PairingStats* stats) {
  if (n < 1) throw std::invalid_argument("need at least one vertex");
  if (d < 0) throw std::invalid_argument("degree must be nonnegative");
  if ((static_cast<long long>(n) * d) % 2 != 0)
    throw std::invalid_argument("n * d must be even");
  std::vector<int> degrees(static_cast<std::size_t>(n), d);
  std::vector<std::pair<int, int>> edges = pair_stubs(degrees, seed, stats);
  return network_from_edges(n, std::move(edges), b);
}

Network configuration_model(const std::vector<int>& degrees,
                            std::uint64_t seed, int b, PairingStats* stats) {
  if (degrees.empty()) throw std::invalid_argument("need at least one vertex");
  std::vector<std::pair<int, int>> edges = pair_stubs(degrees, seed, stats);
  return network_from_edges(static_cast<int>(degrees.size()),
                            std::move(edges), b);
}

Network configuration_model(const DegreeDistribution& pi, int n,
                            std::uint64_t seed, int b, PairingStats* stats) {
  if (n < 1) throw std::invalid_argument("need at least one vertex");
  CounterRng deg_rng(CounterRng::derive(seed, kSaltDegrees));
  std::vector<int> degrees(static_cast<std::size_t>(n));
  long long total = 0;
  for (int v = 0; v < n; ++v) {
    degrees[static_cast<std::size_t>(v)] = pi.sample(deg_rng);
    total += degrees[static_cast<std::size_t>(v)];
  }
  int bumped = -1;
  if (total % 2 != 0) {
    CounterRng fix(CounterRng::derive(seed, kSaltParity));
    bumped = static_cast<int>(fix.below(static_cast<std::uint64_t>(n)));
    ++degrees[static_cast<std::size_t>(bumped)];
  }
  std::vector<std::pair<int, int>> edges = pair_stubs(degrees, seed, stats);
  if (stats) stats->parity_bumped_vertex = bumped;
  return network_from_edges(n, std::move(edges), b);
}

}
