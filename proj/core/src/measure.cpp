#include "cavity/measure.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace cavity {

namespace {

constexpr int kTableGroundCap = 24;
constexpr int kEnumGroundCap = 20;

[[noreturn]] void throw_element(int element, int m) {
  throw std::invalid_argument("element index " + std::to_string(element) +
                              " outside ground set of size " +
                              std::to_string(m));
}

void check_field_length(std::span<const double> field, std::size_t expected,
                        const char* what) {
  if (field.size() != expected) {
    throw std::invalid_argument(std::string(what) + " must have length " +
                                std::to_string(expected) + ", got " +
                                std::to_string(field.size()));
  }
}

void reject_infinite(std::span<const double> field, const char* what) {
  for (double w : field) {
    if (is_infinite(w)) {
      throw std::domain_error(std::string(what) +
                              " requires finite field entries");
    }
  }
}

void require_empty_weight(const LocalMeasure& mu, const char* what) {
  if (!(mu.empty_weight() > 0.0)) {
    throw std::domain_error(std::string(what) +
                            " requires positive weight on the empty set");
  }
}

// Index of the top strictly positive coefficient, or -1 if none.
int top_positive(std::span<const double> coeffs) {
  for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k) {
    if (coeffs[k] > 0.0) return k;
  }
  return -1;
}

double resolve_degree_ratio(std::span<const double> num,
                            std::span<const double> den, const char* what) {
  int kn = top_positive(num);
  int kd = top_positive(den);
  if (kn < 0) return 0.0;
  if (kd < 0) {
    throw std::logic_error(std::string(what) +
                           ": denominator vanished despite mu(empty) > 0");
  }
  if (kn > kd) return kInf;
  if (kn < kd) return 0.0;
  return num[kn] / den[kd];
}

}  // namespace

LocalMeasure LocalMeasure::b_matching(int ground_size, int capacity) {
  if (ground_size < 0) {
    throw std::invalid_argument("ground size must be nonnegative");
  }
  if (capacity < 1) {
    throw std::invalid_argument("capacity must be at least 1");
  }
  LocalMeasure mu;
  mu.kind_ = MeasureKind::BMatching;
  mu.m_ = ground_size;
  mu.capacity_ = capacity;
  mu.coeffs_.assign(static_cast<std::size_t>(ground_size) + 1, 0.0);
  for (int k = 0; k <= ground_size && k <= capacity; ++k) {
    mu.coeffs_[k] = 1.0;
  }
  mu.finalize_stats();
  return mu;
}

LocalMeasure LocalMeasure::exchangeable(std::vector<double> coeffs) {
  if (coeffs.empty()) {
    throw std::invalid_argument(
        "coefficient vector must have length ground_size + 1, got empty");
  }
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (std::isnan(coeffs[k]) || coeffs[k] < 0.0 || is_infinite(coeffs[k])) {
      throw std::invalid_argument("coefficient " + std::to_string(k) +
                                  " must be finite and nonnegative");
    }
  }
  if (top_positive(coeffs) < 0) {
    throw std::invalid_argument("measure must give some subset positive weight");
  }
  LocalMeasure mu;
  mu.kind_ = MeasureKind::Exchangeable;
  mu.m_ = static_cast<int>(coeffs.size()) - 1;
  mu.coeffs_ = std::move(coeffs);
  mu.finalize_stats();
  return mu;
}

LocalMeasure LocalMeasure::table(int ground_size,
                                 const std::vector<TableEntry>& entries) {
  if (ground_size < 0) {
    throw std::invalid_argument("ground size must be nonnegative");
  }
  if (ground_size > kTableGroundCap) {
    throw std::length_error("table measures support ground size up to " +
                            std::to_string(kTableGroundCap) + ", got " +
                            std::to_string(ground_size));
  }
  LocalMeasure mu;
  mu.kind_ = MeasureKind::Table;
  mu.m_ = ground_size;
  std::unordered_set<std::uint32_t> seen;
  for (const TableEntry& entry : entries) {
    std::uint32_t mask = 0;
    for (int e : entry.subset) {
      if (e < 0 || e >= ground_size) throw_element(e, ground_size);
      std::uint32_t bit = 1u << e;
      if (mask & bit) {
        throw std::invalid_argument("duplicate element " + std::to_string(e) +
                                    " in table subset");
      }
      mask |= bit;
    }
    if (std::isnan(entry.weight) || entry.weight < 0.0 ||
        is_infinite(entry.weight)) {
      throw std::invalid_argument("table weight must be finite and nonnegative");
    }
    if (!seen.insert(mask).second) {
      throw std::invalid_argument("duplicate subset in table entries");
    }
    if (entry.weight > 0.0) {
      mu.support_.emplace_back(mask, entry.weight);
    }
  }
  if (mu.support_.empty()) {
    throw std::invalid_argument("measure must give some subset positive weight");
  }
  std::sort(mu.support_.begin(), mu.support_.end());
  mu.finalize_stats();
  return mu;
}

void LocalMeasure::finalize_stats() {
  if (kind_ == MeasureKind::Table) {
    empty_weight_ = 0.0;
    rank_ = 0;
    double wmin = kInf;
    double wmax = 0.0;
    for (const auto& [mask, weight] : support_) {
      if (mask == 0) empty_weight_ = weight;
      rank_ = std::max(rank_, std::popcount(mask));
      wmin = std::min(wmin, weight);
      wmax = std::max(wmax, weight);
    }
    amplitude_ = wmax / wmin;
  } else {
    empty_weight_ = coeffs_[0];
    rank_ = top_positive(coeffs_);
    double wmin = kInf;
    double wmax = 0.0;
    for (double c : coeffs_) {
      if (c > 0.0) {
        wmin = std::min(wmin, c);
        wmax = std::max(wmax, c);
      }
    }
    amplitude_ = wmax / wmin;
  }
}

int LocalMeasure::capacity() const {
  if (kind_ != MeasureKind::BMatching) {
    throw std::logic_error("capacity() is only defined for BMatching measures");
  }
  return capacity_;
}

const std::vector<double>& LocalMeasure::coeffs() const {
  if (kind_ == MeasureKind::Table) {
    throw std::logic_error("coeffs() is not defined for table measures");
  }
  return coeffs_;
}

const std::vector<std::pair<std::uint32_t, double>>& LocalMeasure::support()
    const {
  if (kind_ != MeasureKind::Table) {
    throw std::logic_error("support() is only defined for table measures");
  }
  return support_;
}

double LocalMeasure::evaluate(std::uint32_t subset_mask) const {
  if (m_ < 32 && (subset_mask >> m_) != 0) {
    throw std::invalid_argument("subset mask has bits outside the ground set");
  }
  if (kind_ == MeasureKind::Table) {
    auto it = std::lower_bound(
        support_.begin(), support_.end(), subset_mask,
        [](const auto& entry, std::uint32_t key) { return entry.first < key; });
    if (it != support_.end() && it->first == subset_mask) return it->second;
    return 0.0;
  }
  return coeffs_[static_cast<std::size_t>(std::popcount(subset_mask))];
}

double LocalMeasure::evaluate(std::span<const int> subset) const {
  std::vector<int> sorted(subset.begin(), subset.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] < 0 || sorted[i] >= m_) throw_element(sorted[i], m_);
    if (i > 0 && sorted[i] == sorted[i - 1]) {
      throw std::invalid_argument("duplicate element " +
                                  std::to_string(sorted[i]) + " in subset");
    }
  }
  if (kind_ != MeasureKind::Table) {
    return coeffs_[sorted.size()];
  }
  std::uint32_t mask = 0;
  for (int e : sorted) mask |= 1u << e;
  return evaluate(mask);
}

double generating_eval(const LocalMeasure& mu, std::span<const double> field) {
  check_field_length(field, static_cast<std::size_t>(mu.ground_size()),
                     "field");
  validate_field(field, "field");
  reject_infinite(field, "generating_eval");
  if (mu.kind() == MeasureKind::Table) {
    KahanSum total;
    for (const auto& [mask, weight] : mu.support()) {
      double term = weight;
      for (std::uint32_t bits = mask; bits != 0; bits &= bits - 1) {
        term *= field[static_cast<std::size_t>(std::countr_zero(bits))];
      }
      total.add(term);
    }
    return total.value();
  }
  std::vector<double> e = elementary_symmetric(field);
  const std::vector<double>& c = mu.coeffs();
  KahanSum total;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (c[k] > 0.0) total.add(c[k] * e[k]);
  }
  return total.value();
}

namespace {

// Splits a full-length extended field into the finite values and the count /
// mask of infinite coordinates.
struct SplitField {
  std::vector<double> finite_values;
  std::uint32_t infinite_mask = 0;  // meaningful for table measures only
  int infinite_count = 0;
};

SplitField split_field(std::span<const double> full, bool build_mask) {
  SplitField out;
  for (std::size_t j = 0; j < full.size(); ++j) {
    if (is_infinite(full[j])) {
      ++out.infinite_count;
      if (build_mask) out.infinite_mask |= 1u << j;
    } else {
      out.finite_values.push_back(full[j]);
    }
  }
  return out;
}

// Product of weight and the finite field values selected by mask, skipping
// coordinates marked infinite (their growth rate is accounted by the caller's
// degree bookkeeping).
double finite_product(double weight, std::uint32_t mask,
                      std::uint32_t infinite_mask,
                      std::span<const double> full) {
  double term = weight;
  for (std::uint32_t bits = mask & ~infinite_mask; bits != 0;
       bits &= bits - 1) {
    term *= full[static_cast<std::size_t>(std::countr_zero(bits))];
  }
  return term;
}

}  // namespace

double cavity_ratio(const LocalMeasure& mu, int element,
                    std::span<const double> field) {
  const int m = mu.ground_size();
  if (element < 0 || element >= m) throw_element(element, m);
  check_field_length(field, static_cast<std::size_t>(m) - 1, "cavity field");
  validate_field(field, "cavity field");
  require_empty_weight(mu, "cavity_ratio");

  if (mu.kind() == MeasureKind::Table) {
    // Full-length field with a placeholder at the excised element.
    std::vector<double> full(static_cast<std::size_t>(m), 0.0);
    for (int j = 0, idx = 0; j < m; ++j) {
      if (j != element) full[static_cast<std::size_t>(j)] = field[idx++];
    }
    SplitField split = split_field(full, true);
    split.infinite_mask &= ~(1u << element);
    std::vector<double> num(static_cast<std::size_t>(m) + 1, 0.0);
    std::vector<double> den(static_cast<std::size_t>(m) + 1, 0.0);
    const std::uint32_t ebit = 1u << element;
    for (const auto& [mask, weight] : mu.support()) {
      std::uint32_t rest = mask & ~ebit;
      int k = std::popcount(rest & split.infinite_mask);
      double term = finite_product(weight, rest, split.infinite_mask, full);
      if (mask & ebit) {
        num[static_cast<std::size_t>(k)] += term;
      } else {
        den[static_cast<std::size_t>(k)] += term;
      }
    }
    return resolve_degree_ratio(num, den, "cavity_ratio");
  }

  SplitField split = split_field(field, false);
  std::vector<double> e = elementary_symmetric(split.finite_values);
  const std::vector<double>& c = mu.coeffs();
  const int L = split.infinite_count;
  std::vector<double> num(static_cast<std::size_t>(L) + 1, 0.0);
  std::vector<double> den(static_cast<std::size_t>(L) + 1, 0.0);
  for (int k = 0; k <= L; ++k) {
    for (std::size_t j = 0; j < e.size(); ++j) {
      std::size_t size_den = static_cast<std::size_t>(k) + j;
      if (size_den < c.size() && c[size_den] > 0.0 && e[j] > 0.0) {
        den[static_cast<std::size_t>(k)] += c[size_den] * e[j];
      }
      std::size_t size_num = size_den + 1;
      if (size_num < c.size() && c[size_num] > 0.0 && e[j] > 0.0) {
        num[static_cast<std::size_t>(k)] += c[size_num] * e[j];
      }
    }
  }
  return resolve_degree_ratio(num, den, "cavity_ratio");
}

double infinite_cavity_ratio(const LocalMeasure& mu, int element,
                             std::span<const double> field) {
  const int m = mu.ground_size();
  if (element < 0 || element >= m) throw_element(element, m);
  check_field_length(field, static_cast<std::size_t>(m) - 1,
                     "cavity field");
  validate_field(field, "cavity field");
  reject_infinite(field, "infinite_cavity_ratio");
  require_empty_weight(mu, "infinite_cavity_ratio");

  // Degree-by-degree coefficients of t * Z_contract(t w) and Z_delete(t w).
  std::vector<double> num(static_cast<std::size_t>(m) + 1, 0.0);
  std::vector<double> den(static_cast<std::size_t>(m) + 1, 0.0);
  if (mu.kind() == MeasureKind::Table) {
    std::vector<double> full(static_cast<std::size_t>(m), 0.0);
    for (int j = 0, idx = 0; j < m; ++j) {
      if (j != element) full[static_cast<std::size_t>(j)] = field[idx++];
    }
    const std::uint32_t ebit = 1u << element;
    for (const auto& [mask, weight] : mu.support()) {
      std::uint32_t rest = mask & ~ebit;
      double term = finite_product(weight, rest, ebit, full);
      std::size_t d = static_cast<std::size_t>(std::popcount(mask));
      if (mask & ebit) {
        num[d] += term;
      } else {
        den[d] += term;
      }
    }
  } else {
    std::vector<double> e = elementary_symmetric(field);
    const std::vector<double>& c = mu.coeffs();
    for (std::size_t d = 1; d < c.size(); ++d) {
      if (c[d] > 0.0 && e[d - 1] > 0.0) num[d] = c[d] * e[d - 1];
    }
    for (std::size_t d = 0; d + 1 < c.size(); ++d) {
      if (c[d] > 0.0 && e[d] > 0.0) den[d] = c[d] * e[d];
    }
  }
  return resolve_degree_ratio(num, den, "infinite_cavity_ratio");
}

double energy(const LocalMeasure& mu, std::span<const double> field) {
  const int m = mu.ground_size();
  check_field_length(field, static_cast<std::size_t>(m), "field");
  validate_field(field, "field");
  require_empty_weight(mu, "energy");

  if (mu.kind() == MeasureKind::Table) {
    SplitField split = split_field(field, true);
    std::vector<double> size_sum(static_cast<std::size_t>(m) + 1, 0.0);
    std::vector<double> mass(static_cast<std::size_t>(m) + 1, 0.0);
    for (const auto& [mask, weight] : mu.support()) {
      int k = std::popcount(mask & split.infinite_mask);
      double term = finite_product(weight, mask, split.infinite_mask, field);
      mass[static_cast<std::size_t>(k)] += term;
      size_sum[static_cast<std::size_t>(k)] += term * std::popcount(mask);
    }
    int kd = top_positive(mass);
    return size_sum[static_cast<std::size_t>(kd)] /
           mass[static_cast<std::size_t>(kd)];
  }

  SplitField split = split_field(field, false);
  std::vector<double> e = elementary_symmetric(split.finite_values);
  const std::vector<double>& c = mu.coeffs();
  const int L = split.infinite_count;
  std::vector<double> size_sum(static_cast<std::size_t>(L) + 1, 0.0);
  std::vector<double> mass(static_cast<std::size_t>(L) + 1, 0.0);
  for (int k = 0; k <= L; ++k) {
    for (std::size_t j = 0; j < e.size(); ++j) {
      std::size_t size = static_cast<std::size_t>(k) + j;
      if (size < c.size() && c[size] > 0.0 && e[j] > 0.0) {
        double term = c[size] * e[j];
        mass[static_cast<std::size_t>(k)] += term;
        size_sum[static_cast<std::size_t>(k)] += term * static_cast<double>(size);
      }
    }
  }
  int kd = top_positive(mass);
  return size_sum[static_cast<std::size_t>(kd)] /
         mass[static_cast<std::size_t>(kd)];
}

bool is_cavity_monotone_exchangeable(std::span<const double> coeffs) {
  validate_field(coeffs, "coefficients");
  if (coeffs.size() < 2 || !(coeffs[0] > 0.0) || !(coeffs[1] > 0.0)) {
    return false;
  }
  int top = top_positive(coeffs);
  for (int k = 0; k <= top; ++k) {
    if (!(coeffs[static_cast<std::size_t>(k)] > 0.0)) return false;
  }
  for (std::size_t k = 1; k + 1 < coeffs.size(); ++k) {
    if (coeffs[k] * coeffs[k] < coeffs[k - 1] * coeffs[k + 1]) return false;
  }
  return true;
}

namespace {

// Exact per-field Gibbs statistics by full subset enumeration (m <= 20).
struct FieldStats {
  double z = 0.0;
  std::vector<double> element_mass;      // sum over F containing e
  std::vector<double> pair_mass;         // flattened e < f, sum over F >= {e,f}
  double size_mass = 0.0;                // sum |F| mu(F) w^F
  std::vector<double> size_element_mass; // sum |F| mu(F) w^F over F containing e
};

std::size_t pair_index(int e, int f, int m) {
  // e < f, row-major over the strict upper triangle
  return static_cast<std::size_t>(e) * m - static_cast<std::size_t>(e) * (e + 1) / 2 +
         static_cast<std::size_t>(f - e - 1);
}

FieldStats enumerate_field(const LocalMeasure& mu,
                           std::span<const double> field) {
  const int m = mu.ground_size();
  FieldStats stats;
  KahanSum z, size_mass;
  std::vector<KahanSum> element(static_cast<std::size_t>(m));
  std::vector<KahanSum> pair(static_cast<std::size_t>(m) * (m - 1) / 2);
  std::vector<KahanSum> size_element(static_cast<std::size_t>(m));

  auto accumulate = [&](std::uint32_t mask, double weight) {
    double term = weight;
    for (std::uint32_t bits = mask; bits != 0; bits &= bits - 1) {
      term *= field[static_cast<std::size_t>(std::countr_zero(bits))];
    }
    if (term == 0.0) return;
    int size = std::popcount(mask);
    z.add(term);
    size_mass.add(term * size);
    for (std::uint32_t bits = mask; bits != 0; bits &= bits - 1) {
      int e = std::countr_zero(bits);
      element[static_cast<std::size_t>(e)].add(term);
      size_element[static_cast<std::size_t>(e)].add(term * size);
      for (std::uint32_t rest = bits & (bits - 1); rest != 0;
           rest &= rest - 1) {
        int f = std::countr_zero(rest);
        pair[pair_index(e, f, m)].add(term);
      }
    }
  };

  if (mu.kind() == MeasureKind::Table) {
    for (const auto& [mask, weight] : mu.support()) accumulate(mask, weight);
  } else {
    const std::uint32_t limit = 1u << m;
    for (std::uint32_t mask = 0; mask < limit; ++mask) {
      double weight =
          mu.coeffs()[static_cast<std::size_t>(std::popcount(mask))];
      if (weight > 0.0) accumulate(mask, weight);
    }
  }

  stats.z = z.value();
  stats.size_mass = size_mass.value();
  stats.element_mass.reserve(element.size());
  for (const KahanSum& s : element) stats.element_mass.push_back(s.value());
  stats.pair_mass.reserve(pair.size());
  for (const KahanSum& s : pair) stats.pair_mass.push_back(s.value());
  stats.size_element_mass.reserve(size_element.size());
  for (const KahanSum& s : size_element) {
    stats.size_element_mass.push_back(s.value());
  }
  return stats;
}

void check_enum_cap(const LocalMeasure& mu, const char* what) {
  if (mu.ground_size() > kEnumGroundCap) {
    throw std::length_error(std::string(what) +
                            " enumerates subsets; ground size capped at " +
                            std::to_string(kEnumGroundCap));
  }
}

std::vector<double> sample_check_field(int m, CounterRng& rng) {
  std::vector<double> field(static_cast<std::size_t>(m));
  for (double& w : field) w = rng.log_uniform(1e-2, 1e2);
  return field;
}

constexpr double kCheckTolerance = 1e-12;

}  // namespace

std::vector<CorrelationViolation> check_rayleigh_sampled(const LocalMeasure& mu,
                                                         int n_fields,
                                                         CounterRng& rng) {
  check_enum_cap(mu, "check_rayleigh_sampled");
  const int m = mu.ground_size();
  std::vector<CorrelationViolation> violations;
  for (int trial = 0; trial < n_fields; ++trial) {
    std::vector<double> field = sample_check_field(m, rng);
    FieldStats stats = enumerate_field(mu, field);
    for (int e = 0; e + 1 < m; ++e) {
      double pe = stats.element_mass[static_cast<std::size_t>(e)] / stats.z;
      for (int f = e + 1; f < m; ++f) {
        double pf = stats.element_mass[static_cast<std::size_t>(f)] / stats.z;
        double pef = stats.pair_mass[pair_index(e, f, m)] / stats.z;
        double excess = pef - pe * pf;
        if (excess > kCheckTolerance) {
          violations.push_back({field, e, f, excess});
        }
      }
    }
  }
  return violations;
}

std::vector<CorrelationViolation> check_size_increasing_sampled(
    const LocalMeasure& mu, int n_fields, CounterRng& rng) {
  check_enum_cap(mu, "check_size_increasing_sampled");
  const int m = mu.ground_size();
  std::vector<CorrelationViolation> violations;
  for (int trial = 0; trial < n_fields; ++trial) {
    std::vector<double> field = sample_check_field(m, rng);
    FieldStats stats = enumerate_field(mu, field);
    double mean_size = stats.size_mass / stats.z;
    for (int e = 0; e < m; ++e) {
      double pe = stats.element_mass[static_cast<std::size_t>(e)] / stats.z;
      double conditional =
          stats.size_element_mass[static_cast<std::size_t>(e)] / stats.z;
      double deficit = mean_size * pe - conditional;
      if (deficit > kCheckTolerance) {
        violations.push_back({field, e, -1, deficit});
      }
    }
  }
  return violations;
}

bool support_is_matroid(const LocalMeasure& mu) {
  check_enum_cap(mu, "support_is_matroid");
  const int m = mu.ground_size();

  std::vector<std::uint32_t> masks;
  if (mu.kind() == MeasureKind::Table) {
    masks.reserve(mu.support().size());
    for (const auto& [mask, weight] : mu.support()) masks.push_back(mask);
  } else {
    const std::uint32_t limit = 1u << m;
    for (std::uint32_t mask = 0; mask < limit; ++mask) {
      if (mu.coeffs()[static_cast<std::size_t>(std::popcount(mask))] > 0.0) {
        masks.push_back(mask);
      }
    }
  }
  if (masks.size() * masks.size() > 200'000'000ull) {
    throw std::length_error(
        "support too large for exchange-axiom enumeration");
  }

  std::vector<bool> member(std::size_t{1} << m, false);
  for (std::uint32_t mask : masks) member[mask] = true;

  if (!member[0]) return false;
  for (std::uint32_t mask : masks) {
    for (std::uint32_t bits = mask; bits != 0; bits &= bits - 1) {
      std::uint32_t without = mask & ~(bits & (0u - bits));
      if (!member[without]) return false;
    }
  }
  for (std::uint32_t small : masks) {
    int small_size = std::popcount(small);
    for (std::uint32_t large : masks) {
      if (std::popcount(large) <= small_size) continue;
      bool extended = false;
      for (std::uint32_t bits = large & ~small; bits != 0;
           bits &= bits - 1) {
        std::uint32_t grown = small | (bits & (0u - bits));
        if (member[grown]) {
          extended = true;
          break;
        }
      }
      if (!extended) return false;
    }
  }
  return true;
}

}
