#include "cavity/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "cavity/numeric.hpp"

namespace cavity {

namespace {

void require_unit_interval(double s) {
  if (!(s >= 0.0 && s <= 1.0))
    throw std::invalid_argument("thinning level must lie in [0,1]");
}

void require_usable(const LimitSpec& spec) {
  if (spec.capacity < 1)
    throw std::invalid_argument("capacity must be at least 1");
  if (!(spec.pi.mean() > 0.0))
    throw std::invalid_argument("degree law needs a positive mean");
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

double degree_gf_deriv(const DegreeDistribution& pi, int order, double s) {
  if (order < 0) throw std::invalid_argument("derivative order must be >= 0");
  require_unit_interval(s);
  const std::vector<double>& p = pi.probs();
  KahanSum acc;
  double pow_s = 1.0;  // s^(n - order), advanced with n
  for (std::size_t n = static_cast<std::size_t>(order); n < p.size(); ++n) {
    double falling = 1.0;
    for (int j = 0; j < order; ++j) falling *= static_cast<double>(n - j);
    acc.add(p[n] * falling * pow_s);
    pow_s *= s;
  }
  return acc.value();
}

double offspring_room(const LimitSpec& spec, double s) {
  require_usable(spec);
  require_unit_interval(s);
  double c = spec.pi.mean();
  KahanSum acc;
  double pow_s = 1.0;
  double fact = 1.0;
  for (int k = 0; k < spec.capacity; ++k) {
    if (k > 0) {
      pow_s *= s;
      fact *= k;
    }
    acc.add(pow_s * degree_gf_deriv(spec.pi, k + 1, 1.0 - s) / fact);
  }
  // A probability up to rounding; composing the map needs it back in range.
  return std::clamp(acc.value() / c, 0.0, 1.0);
}

double offspring_room_deriv(const LimitSpec& spec, double s) {
  require_usable(spec);
  require_unit_interval(s);
  int b = spec.capacity;
  double c = spec.pi.mean();
  return -std::pow(s, b - 1) * degree_gf_deriv(spec.pi, b + 1, 1.0 - s) /
         (c * factorial(b - 1));
}

double vertex_room(const LimitSpec& spec, double s) {
  require_usable(spec);
  require_unit_interval(s);
  KahanSum acc;
  double pow_s = 1.0;
  double fact = 1.0;
  for (int k = 0; k <= spec.capacity; ++k) {
    if (k > 0) {
      pow_s *= s;
      fact *= k;
    }
    acc.add(pow_s * degree_gf_deriv(spec.pi, k, 1.0 - s) / fact);
  }
  return std::clamp(acc.value(), 0.0, 1.0);
}

double size_density(const LimitSpec& spec, double s) {
  require_usable(spec);
  require_unit_interval(s);
  double b = spec.capacity;
  double c = spec.pi.mean();
  double fs = offspring_room(spec, s);
  double ffs = offspring_room(spec, fs);
  return b - 0.5 * b * vertex_room(spec, s) - 0.5 * b * vertex_room(spec, fs) +
         0.5 * c * fs * ffs;
}

double size_density_deriv(const LimitSpec& spec, double s) {
  // Telescoping the room sums gives g'(s) = (c s / b) f'(s), under which the
  // chain rule collapses to this product; the factor c/2 keeps it the honest
  // derivative of size_density.
  double c = spec.pi.mean();
  double fs = offspring_room(spec, s);
  double ffs = offspring_room(spec, fs);
  return 0.5 * c * offspring_room_deriv(spec, s) * (ffs - s);
}

MinimaReport historical_minima(const LimitSpec& spec, int grid_n, double tol) {
  require_usable(spec);
  if (grid_n < 4) throw std::invalid_argument("grid too coarse");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

  auto residual = [&](double s) {
    return offspring_room(spec, offspring_room(spec, s)) - s;
  };

  std::size_t n = static_cast<std::size_t>(grid_n);
  double step = 1.0 / static_cast<double>(n);
  std::vector<double> r(n + 1);
  std::vector<double> h(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    double s = static_cast<double>(i) * step;
    r[i] = residual(s);
    h[i] = size_density(spec, s);
  }

  MinimaReport report;
  std::vector<double> roots;
  for (std::size_t i = 0; i <= n; ++i)
    if (r[i] == 0.0) roots.push_back(static_cast<double>(i) * step);
  for (std::size_t i = 0; i < n; ++i) {
    if (r[i] == 0.0 || r[i + 1] == 0.0) continue;
    if ((r[i] > 0.0) == (r[i + 1] > 0.0)) continue;
    double lo = static_cast<double>(i) * step;
    double hi = static_cast<double>(i + 1) * step;
    double rlo = r[i];
    while (hi - lo > tol) {
      double mid = 0.5 * (lo + hi);
      double rm = residual(mid);
      if (rm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((rm > 0.0) == (rlo > 0.0)) {
        lo = mid;
        rlo = rm;
      } else {
        hi = mid;
      }
    }
    roots.push_back(0.5 * (lo + hi));
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [&](double a, double b2) {
                            return std::abs(a - b2) < 4.0 * tol;
                          }),
              roots.end());

  // A near-tangency touches zero without a grid sign change; the scan cannot
  // certify it either way, so surface a flag instead of guessing.
  constexpr double kTangentialTol = 1e-8;
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(r[i]) >= kTangentialTol) continue;
    if (std::abs(r[i]) > std::abs(r[i - 1]) ||
        std::abs(r[i]) > std::abs(r[i + 1]))
      continue;
    double s = static_cast<double>(i) * step;
    bool near_root = false;
    for (double root : roots)
      if (std::abs(root - s) <= 2.0 * step) near_root = true;
    if (!near_root) report.tangential_suspect = true;
  }

  report.roots = roots;
  report.densities.reserve(roots.size());
  for (double root : roots) report.densities.push_back(size_density(spec, root));

  // Historical means strictly below every earlier density value. Grid points
  // within two steps of the root are skipped: the density flattens there and
  // float noise would mask the strict comparison.
  constexpr double kHistTol = 1e-12;
  report.historical.resize(roots.size(), false);
  for (std::size_t k = 0; k < roots.size(); ++k) {
    double earlier = kInf;
    double cutoff = roots[k] - 2.0 * step;
    for (std::size_t i = 0; i <= n; ++i) {
      double s = static_cast<double>(i) * step;
      if (s > cutoff) break;
      earlier = std::min(earlier, h[i]);
    }
    for (std::size_t j = 0; j < k; ++j)
      earlier = std::min(earlier, report.densities[j]);
    report.historical[k] =
        earlier == kInf || report.densities[k] < earlier - kHistTol;
  }

  double best = kInf;
  for (double v : h) best = std::min(best, v);
  for (double v : report.densities) best = std::min(best, v);
  report.min_density = best;
  return report;
}

double karp_sipser_density(double c) {
  if (!(c > 0.0) || !std::isfinite(c))
    throw std::invalid_argument("mean degree must be positive and finite");
  auto q = [&](double t) { return t - std::exp(-c * std::exp(-c * t)); };
  const int kScan = 20000;
  double root = -1.0;
  double prev_t = 0.0;
  double prev_q = q(0.0);
  if (prev_q == 0.0) root = 0.0;
  for (int i = 1; i <= kScan && root < 0.0; ++i) {
    double t = static_cast<double>(i) / kScan;
    double qt = q(t);
    if (qt == 0.0) {
      root = t;
      break;
    }
    if ((qt > 0.0) != (prev_q > 0.0)) {
      double lo = prev_t;
      double hi = t;
      double qlo = prev_q;
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        double mid = 0.5 * (lo + hi);
        double qm = q(mid);
        if (qm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((qm > 0.0) == (qlo > 0.0)) {
          lo = mid;
          qlo = qm;
        } else {
          hi = mid;
        }
      }
      root = 0.5 * (lo + hi);
      break;
    }
    prev_t = t;
    prev_q = qt;
  }
  if (root < 0.0) throw std::runtime_error("fixed point scan failed");
  double et = std::exp(-c * root);
  return 1.0 - 0.5 * (root + et + c * root * et);
}

}
