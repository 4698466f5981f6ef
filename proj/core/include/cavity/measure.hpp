#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cavity/numeric.hpp"
#include "cavity/rng.hpp"

namespace cavity {

enum class MeasureKind { Table, Exchangeable, BMatching };

// Nonnegative weight function on subsets of a ground set {0..m-1} (a vertex's
// incident edge slots). Three representations:
//   Table        explicit subset -> weight map, ground size capped at 24;
//   Exchangeable weight depends only on subset size, via coefficients c(0..m);
//   BMatching    indicator of |F| <= b, stored as the equivalent coefficient
//                vector so both paths share one evaluation semantics.
// Immutable after construction; all operations on it are pure.
class LocalMeasure {
 public:
  struct TableEntry {
    std::vector<int> subset;
    double weight = 0.0;
  };

  static LocalMeasure b_matching(int ground_size, int capacity);
  // Ground size is coeffs.size() - 1.
  static LocalMeasure exchangeable(std::vector<double> coeffs);
  static LocalMeasure table(int ground_size,
                            const std::vector<TableEntry>& entries);

  MeasureKind kind() const { return kind_; }
  int ground_size() const { return m_; }

  // BMatching only.
  int capacity() const;
  // Exchangeable and BMatching (materialized as c(k) = 1{k <= b}).
  const std::vector<double>& coeffs() const;
  // Table only: (mask, weight) pairs sorted by mask, zero weights dropped.
  const std::vector<std::pair<std::uint32_t, double>>& support() const;

  double evaluate(std::uint32_t subset_mask) const;
  double evaluate(std::span<const int> subset) const;

  double empty_weight() const { return empty_weight_; }
  // Largest subset size carrying positive weight.
  int rank() const { return rank_; }
  // max/min positive weight over the support (the amplitude A used in the
  // energy bounds); 1 for BMatching.
  double amplitude() const { return amplitude_; }

 private:
  LocalMeasure() = default;
  void finalize_stats();

  MeasureKind kind_ = MeasureKind::Exchangeable;
  int m_ = 0;
  int capacity_ = 0;
  std::vector<double> coeffs_;
  std::vector<std::pair<std::uint32_t, double>> support_;
  double empty_weight_ = 0.0;
  int rank_ = 0;
  double amplitude_ = 1.0;
};

// Z(w) = sum_F mu(F) prod_{e in F} w_e. Field must be finite, length m.
// Exchangeable path uses elementary symmetric polynomials; Table iterates its
// support.
double generating_eval(const LocalMeasure& mu, std::span<const double> field);

// Cavity ratio at `element`: the contraction/deletion ratio of the generating
// polynomial, field over the m-1 remaining elements in increasing index
// order, entries in [0, inf]. Infinite entries are resolved by the
// conditioning limit: both sums are viewed as polynomials in a common rate
// variable for the infinite coordinates and only the leading coefficients
// compete. Requires mu(empty) > 0.
double cavity_ratio(const LocalMeasure& mu, int element,
                    std::span<const double> field);

// Limit of t * cavity_ratio(t * field) as t grows without bound; finite field
// entries only. Compares degrees of the two polynomials in t; returns +inf /
// leading-coefficient ratio / 0 as the numerator degree exceeds / matches /
// falls short of the denominator degree. For BMatching this reduces to
// e_{b-1}(field) / e_b(field), infinite when fewer than b entries are
// positive.
double infinite_cavity_ratio(const LocalMeasure& mu, int element,
                             std::span<const double> field);

// Expected subset size under the Gibbs law tilted by the field; entries in
// [0, inf], infinite ones via the same conditioning limit. Requires
// mu(empty) > 0.
double energy(const LocalMeasure& mu, std::span<const double> field);

// True iff the coefficient vector is log-concave and its support is an
// integer interval containing both 0 and 1. Sufficient for the measure to be
// Rayleigh and size-increasing.
bool is_cavity_monotone_exchangeable(std::span<const double> coeffs);

// One sampled counterexample from the correlation checks below. For the
// Rayleigh check, elements e < f with P(e,f in F) - P(e in F) P(f in F) =
// excess > tolerance. For the size-increasing check f is -1 and excess is
// E[|F|] P(e in F) - E[|F| 1(e in F)].
struct CorrelationViolation {
  std::vector<double> field;
  int e = -1;
  int f = -1;
  double excess = 0.0;
};

// Sampled certification (not a proof): n_fields random positive fields,
// log-uniform on [1e-2, 1e2] per coordinate, exact enumeration per field.
// Empty result means no violation was found. Ground size capped at 20.
std::vector<CorrelationViolation> check_rayleigh_sampled(
    const LocalMeasure& mu, int n_fields, CounterRng& rng);
std::vector<CorrelationViolation> check_size_increasing_sampled(
    const LocalMeasure& mu, int n_fields, CounterRng& rng);

// Checks by enumeration that the support contains the empty set, is downward
// closed, and satisfies the exchange axiom. Ground size capped at 20.
bool support_is_matroid(const LocalMeasure& mu);

}
