#pragma once

#include <cstdint>
#include <vector>

#include "cavity/network.hpp"
#include "cavity/rng.hpp"

namespace cavity {

// Probability distribution on degrees 0..K with finite positive mean where
// size-biasing is requested. Immutable.
class DegreeDistribution {
 public:
  static DegreeDistribution explicit_probs(std::vector<double> probs);
  // Poisson(mean) conditioned on {0..max_degree}; the discarded tail must be
  // small enough that renormalization moves no probability by more than the
  // advertised 1e-12.
  static DegreeDistribution poisson_truncated(double mean, int max_degree = 60);

  const std::vector<double>& probs() const { return probs_; }
  int max_degree() const { return static_cast<int>(probs_.size()) - 1; }
  double mean() const { return mean_; }
  // CDF inversion; deterministic given the generator state.
  int sample(CounterRng& rng) const;

 private:
  explicit DegreeDistribution(std::vector<double> probs);
  std::vector<double> probs_;
  std::vector<double> cdf_;
  double mean_ = 0.0;
};

// probs_out[n] = (n+1) probs_in[n+1] / mean: the offspring law seen along a
// uniformly chosen edge.
DegreeDistribution size_biased(const DegreeDistribution& pi);

// Erasure bookkeeping for the stub-pairing generators.
struct PairingStats {
  int self_loops_removed = 0;
  int parallel_removed = 0;
  int parity_bumped_vertex = -1;  // vertex whose degree was raised by one to
                                  // fix an odd stub total, -1 if none
};

// G(n, p = c/n) by skip sampling over the ordered pair list; capacity-b
// measures attached to the realized degrees. Deterministic in seed.
Network erdos_renyi(int n, double c, std::uint64_t seed, int b);

// Stub pairing with self-loops and duplicate edges erased (degrees may fall
// short of the request). Requires an even stub total.
Network random_regular(int n, int d, std::uint64_t seed, int b,
                       PairingStats* stats = nullptr);

Network configuration_model(const std::vector<int>& degrees,
                            std::uint64_t seed, int b,
                            PairingStats* stats = nullptr);

// Degrees drawn iid from pi; an odd stub total is fixed by bumping one
// uniformly chosen vertex's degree by one (recorded in stats).
Network configuration_model(const DegreeDistribution& pi, int n,
                            std::uint64_t seed, int b,
                            PairingStats* stats = nullptr);

}
