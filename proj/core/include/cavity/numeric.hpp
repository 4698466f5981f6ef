#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace cavity {

// Extended nonnegative reals [0, +inf]. +inf is a legitimate value for cavity
// fields and ratios; NaN and negatives are rejected at the boundaries.
inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_infinite(double x) { return x == kInf; }

// Throws std::invalid_argument unless every entry is in [0, +inf] (NaN rejected).
// `what` names the offending array in the message.
void validate_field(std::span<const double> field, const char* what);
void validate_scalar(double value, const char* what);

// Distance between two extended nonnegative reals used for convergence checks:
// absolute for values <= 1, relative above, and exact for infinities
// (both infinite -> 0, exactly one infinite -> +inf).
double scaled_gap(double a, double b);

// Distance after compactifying [0, inf] via x -> x/(1+x) (inf -> 1). Bounded
// by 1, continuous at infinity; used where iterates may legitimately diverge
// to +inf.
double compact_gap(double a, double b);

// Compensated (Kahan) accumulator for long sums of doubles.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

// Elementary symmetric polynomials e_0..e_m of the given values, via the
// one-pass product recurrence. Values must be finite and nonnegative.
std::vector<double> elementary_symmetric(std::span<const double> values);

// log(exp(a) + exp(b)) without overflow; -inf represents log(0).
double log_sum_exp(double a, double b);

}
