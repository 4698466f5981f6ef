#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cavity/ensembles.hpp"

namespace cavity {

enum class PoolSide {
  Fraction,  // values in [0,1], the image of the finite-ratio map
  Growth     // values in (0, +inf], the image of the growth map
};

struct PopulationPool {
  std::vector<double> samples;
  PoolSide side = PoolSide::Fraction;
};

// One sweep of the distributional recursion: every output slot draws an
// offspring count from pi_hat and that many input samples with replacement,
// then applies the capacity-b ratio. Streams are keyed on (seed, epoch,
// slot), so a pool is reproducible independent of evaluation order.
PopulationPool ratio_generation(const PopulationPool& growth,
                                const DegreeDistribution& pi_hat, int b,
                                std::uint64_t seed, std::uint64_t epoch);
PopulationPool growth_generation(const PopulationPool& fraction,
                                 const DegreeDistribution& pi_hat, int b,
                                 std::uint64_t seed, std::uint64_t epoch);

struct RdeOptions {
  std::size_t pool_size = 100000;
  std::size_t max_iters = 200;
  bool stop_at_noise_floor = true;  // stop once |s_{n+1} - s_n| < 3/sqrt(N)
  std::uint64_t seed = 0;
};

struct RdeTrajectory {
  std::vector<double> s;      // positive fraction per ratio-side pool
  PopulationPool final_pool;  // last ratio-side pool
  std::size_t iterations = 0;
  double noise_floor = 0.0;
  // The exact two-step recursion moves s one way; sustained moves in both
  // directions beyond the noise floor indicate a bug or too small a pool.
  bool monotone_violation = false;
};

// Ratio-side pool with round(s_init * n) slots at 1 and the rest at 0, the
// deterministic stand-in for a Bernoulli(s_init) start.
PopulationPool initial_pool(std::size_t n, double s_init);

// Two-step population dynamics started from initial_pool(pool_size, s_init).
RdeTrajectory solve_rde(const DegreeDistribution& pi, int b, double s_init,
                        const RdeOptions& opts);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

// Monte Carlo estimate of the per-vertex size density at a fixed point:
// half the root occupation, roots drawing pi-many fresh growth samples.
MeanEstimate size_density_of(const PopulationPool& fraction,
                             const DegreeDistribution& pi, int b,
                             std::size_t n_eval, std::uint64_t seed);

}
