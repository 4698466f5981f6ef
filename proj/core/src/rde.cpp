#include "cavity/rde.hpp"

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "cavity/measure.hpp"
#include "cavity/numeric.hpp"
#include "cavity/rng.hpp"

namespace cavity {

namespace {

constexpr std::uint64_t kSaltEvalPool = 0x6576616c706f6f6cull;
constexpr std::uint64_t kSaltEvalDraw = 0x6576616c64726177ull;

// Capacity measures by ground size, built on demand; the recursion touches
// only a few dozen distinct sizes.
class MeasureCache {
 public:
  MeasureCache(int b) : b_(b) {}
  const LocalMeasure& get(int ground_size) {
    std::size_t g = static_cast<std::size_t>(ground_size);
    if (g >= slots_.size()) slots_.resize(g + 1);
    if (!slots_[g]) slots_[g].emplace(LocalMeasure::b_matching(ground_size, b_));
    return *slots_[g];
  }

 private:
  int b_;
  std::vector<std::optional<LocalMeasure>> slots_;
};

void require_pool(const PopulationPool& pool, PoolSide side,
                  const char* what) {
  if (pool.samples.empty())
    throw std::invalid_argument(std::string(what) + ": empty pool");
  if (pool.side != side)
    throw std::invalid_argument(std::string(what) +
                                ": pool is on the wrong side");
}

}  // namespace

PopulationPool ratio_generation(const PopulationPool& growth,
                                const DegreeDistribution& pi_hat, int b,
                                std::uint64_t seed, std::uint64_t epoch) {
  require_pool(growth, PoolSide::Growth, "ratio_generation");
  if (b < 1) throw std::invalid_argument("capacity must be at least 1");
  for (double y : growth.samples)
    if (!(y > 0.0))
      throw std::logic_error("growth-side pool contains a nonpositive value");

  MeasureCache cache(b);
  std::size_t n_pool = growth.samples.size();
  PopulationPool out;
  out.side = PoolSide::Fraction;
  out.samples.resize(n_pool);
  std::vector<double> field;
  for (std::size_t i = 0; i < n_pool; ++i) {
    CounterRng rng(CounterRng::derive(seed, epoch, i));
    int n = pi_hat.sample(rng);
    field.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
      field[static_cast<std::size_t>(j)] = growth.samples[rng.below(n_pool)];
    out.samples[i] = cavity_ratio(cache.get(n + 1), 0, field);
  }
  return out;
}

PopulationPool growth_generation(const PopulationPool& fraction,
                                 const DegreeDistribution& pi_hat, int b,
                                 std::uint64_t seed, std::uint64_t epoch) {
  require_pool(fraction, PoolSide::Fraction, "growth_generation");
  if (b < 1) throw std::invalid_argument("capacity must be at least 1");
  for (double x : fraction.samples)
    if (!(x >= 0.0 && x <= 1.0))
      throw std::logic_error("ratio-side pool has a value outside [0,1]");

  MeasureCache cache(b);
  std::size_t n_pool = fraction.samples.size();
  PopulationPool out;
  out.side = PoolSide::Growth;
  out.samples.resize(n_pool);
  std::vector<double> field;
  for (std::size_t i = 0; i < n_pool; ++i) {
    CounterRng rng(CounterRng::derive(seed, epoch, i));
    int n = pi_hat.sample(rng);
    field.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
      field[static_cast<std::size_t>(j)] = fraction.samples[rng.below(n_pool)];
    double z = infinite_cavity_ratio(cache.get(n + 1), 0, field);
    if (!(z > 0.0))
      throw std::logic_error("growth map produced a nonpositive value");
    out.samples[i] = z;
  }
  return out;
}

PopulationPool initial_pool(std::size_t n, double s_init) {
  if (!(s_init >= 0.0 && s_init <= 1.0))
    throw std::invalid_argument("s_init must lie in [0,1]");
  if (n < 1) throw std::invalid_argument("pool too small");
  PopulationPool pool;
  pool.side = PoolSide::Fraction;
  pool.samples.assign(n, 0.0);
  std::size_t ones =
      static_cast<std::size_t>(std::llround(s_init * static_cast<double>(n)));
  for (std::size_t i = 0; i < ones && i < n; ++i) pool.samples[i] = 1.0;
  return pool;
}

RdeTrajectory solve_rde(const DegreeDistribution& pi, int b, double s_init,
                        const RdeOptions& opts) {
  if (opts.pool_size < 4) throw std::invalid_argument("pool too small");
  DegreeDistribution pi_hat = size_biased(pi);

  std::size_t n_pool = opts.pool_size;
  RdeTrajectory traj;
  traj.noise_floor = 3.0 / std::sqrt(static_cast<double>(n_pool));

  PopulationPool current = initial_pool(n_pool, s_init);

  auto positive_fraction = [](const PopulationPool& pool) {
    std::size_t count = 0;
    for (double x : pool.samples)
      if (x > 0.0) ++count;
    return static_cast<double>(count) /
           static_cast<double>(pool.samples.size());
  };

  traj.s.push_back(positive_fraction(current));
  bool rose = false;
  bool fell = false;
  for (std::size_t k = 0; k < opts.max_iters; ++k) {
    PopulationPool growth =
        growth_generation(current, pi_hat, b, opts.seed, 2 * k);
    current = ratio_generation(growth, pi_hat, b, opts.seed, 2 * k + 1);
    double s_next = positive_fraction(current);
    double delta = s_next - traj.s.back();
    if (delta > traj.noise_floor) rose = true;
    if (delta < -traj.noise_floor) fell = true;
    traj.s.push_back(s_next);
    traj.iterations = k + 1;
    if (opts.stop_at_noise_floor && std::abs(delta) < traj.noise_floor) break;
  }
  traj.monotone_violation = rose && fell;
  traj.final_pool = std::move(current);
  return traj;
}

MeanEstimate size_density_of(const PopulationPool& fraction,
                             const DegreeDistribution& pi, int b,
                             std::size_t n_eval, std::uint64_t seed) {
  require_pool(fraction, PoolSide::Fraction, "size_density_of");
  if (n_eval < 2) throw std::invalid_argument("need at least two evaluations");
  if (pi.mean() == 0.0) {
    // Every vertex is isolated: the density is exactly zero, no sampling
    // needed (and no size-biased law exists to sample from).
    MeanEstimate est;
    est.samples = n_eval;
    return est;
  }
  DegreeDistribution pi_hat = size_biased(pi);
  std::uint64_t pool_seed = CounterRng::derive(seed, kSaltEvalPool);
  PopulationPool growth = growth_generation(fraction, pi_hat, b, pool_seed, 0);

  MeasureCache cache(b);
  std::size_t n_pool = growth.samples.size();
  std::vector<double> field;
  double mean = 0.0;
  double m2 = 0.0;
  std::uint64_t draw_seed = CounterRng::derive(seed, kSaltEvalDraw);
  for (std::size_t i = 0; i < n_eval; ++i) {
    CounterRng rng(CounterRng::derive(draw_seed, i));
    int n = pi.sample(rng);
    field.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
      field[static_cast<std::size_t>(j)] = growth.samples[rng.below(n_pool)];
    double u = 0.5 * energy(cache.get(n), field);
    double delta = u - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (u - mean);
  }
  MeanEstimate est;
  est.mean = mean;
  est.samples = n_eval;
  est.std_error = std::sqrt(
      m2 / (static_cast<double>(n_eval - 1) * static_cast<double>(n_eval)));
  return est;
}

}
