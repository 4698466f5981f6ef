#include "cavity/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cavity {

void validate_scalar(double value, const char* what) {
  if (std::isnan(value) || value < 0.0) {
    throw std::invalid_argument(std::string(what) +
                                " must be in [0, inf], got " +
                                std::to_string(value));
  }
}

void validate_field(std::span<const double> field, const char* what) {
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (std::isnan(field[i]) || field[i] < 0.0) {
      throw std::invalid_argument(std::string(what) + " entry " +
                                  std::to_string(i) +
                                  " must be in [0, inf], got " +
                                  std::to_string(field[i]));
    }
  }
}

double scaled_gap(double a, double b) {
  bool ia = is_infinite(a);
  bool ib = is_infinite(b);
  if (ia && ib) return 0.0;
  if (ia || ib) return kInf;
  return std::abs(a - b) / std::max(1.0, std::max(a, b));
}

double compact_gap(double a, double b) {
  auto squash = [](double x) { return is_infinite(x) ? 1.0 : x / (1.0 + x); };
  return std::abs(squash(a) - squash(b));
}

std::vector<double> elementary_symmetric(std::span<const double> values) {
  std::vector<double> e(values.size() + 1, 0.0);
  e[0] = 1.0;
  std::size_t filled = 0;
  for (double v : values) {
    ++filled;
    for (std::size_t j = filled; j >= 1; --j) {
      e[j] += v * e[j - 1];
    }
  }
  return e;
}

double log_sum_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}
