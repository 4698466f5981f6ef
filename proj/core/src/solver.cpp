#include "cavity/solver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cavity/exact.hpp"
#include "cavity/numeric.hpp"

namespace cavity {

namespace {

constexpr double kEnergyIdentityTol = 1e-9;

void check_activity(double t) {
  if (std::isnan(t) || t <= 0.0 || is_infinite(t)) {
    throw std::invalid_argument("activity t must be finite and positive");
  }
}

void check_tol(double tol) {
  // tol = 0 is a valid request: stop only when the bracket is exactly closed
  // (trees reach that within diameter + 1 sweeps).
  if (std::isnan(tol) || tol < 0.0) {
    throw std::invalid_argument("tolerance must be nonnegative");
  }
}

void check_configuration(const Network& net, const Configuration& x) {
  if (static_cast<int>(x.size()) != net.n_arcs()) {
    throw std::invalid_argument("configuration must have one entry per arc (" +
                                std::to_string(net.n_arcs()) + "), got " +
                                std::to_string(x.size()));
  }
  validate_field(x, "configuration");
}

std::size_t resolve_max_iters(const Network& net, const SolveOptions& opts) {
  if (opts.max_iters != 0) return opts.max_iters;
  return 10 * static_cast<std::size_t>(diameter(net)) + 1000;
}

void gather_inputs(const Configuration& x, std::span<const int> arcs,
                   std::vector<double>& field) {
  field.resize(arcs.size());
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    field[i] = x[static_cast<std::size_t>(arcs[i])];
  }
}

void gather_incoming(const Network& net, const Configuration& x, int vertex,
                     std::vector<double>& field) {
  gather_inputs(x, net.incoming_arcs(vertex), field);
}

double bracket_gap(const Configuration& lower, const Configuration& upper) {
  double gap = 0.0;
  for (std::size_t a = 0; a < lower.size(); ++a) {
    gap = std::max(gap, scaled_gap(lower[a], upper[a]));
  }
  return gap;
}

}  // namespace

Configuration CavitySolution::midpoint() const {
  Configuration mid(lower.size());
  for (std::size_t a = 0; a < lower.size(); ++a) {
    if (is_infinite(lower[a]) || is_infinite(upper[a])) {
      mid[a] = kInf;
    } else {
      mid[a] = 0.5 * (lower[a] + upper[a]);
    }
  }
  return mid;
}

Configuration cavity_update(const Network& net, const Configuration& x,
                            double t) {
  check_activity(t);
  check_configuration(net, x);
  Configuration out(x.size());
  std::vector<double> field;
  for (int a = 0; a < net.n_arcs(); ++a) {
    gather_inputs(x, net.arc_inputs(a), field);
    const LocalMeasure& mu = net.measure(net.arc_source(a));
    out[static_cast<std::size_t>(a)] =
        t * cavity_ratio(mu, net.arc_element(a), field);
  }
  return out;
}

CavitySolution solve_cavity(const Network& net, double t, SolveOptions opts) {
  check_activity(t);
  check_tol(opts.tol);
  const std::size_t max_iters = resolve_max_iters(net, opts);

  CavitySolution sol;
  sol.t = t;
  sol.lower.assign(static_cast<std::size_t>(net.n_arcs()), 0.0);
  sol.upper = sol.lower;
  if (net.n_arcs() == 0) {
    sol.converged = true;
    return sol;
  }
  sol.gap = kInf;

  Configuration current = sol.lower;
  bool have_upper = false;
  while (sol.iterations < max_iters) {
    current = cavity_update(net, current, t);
    ++sol.iterations;
    if (sol.iterations % 2 == 1) {
      sol.upper = current;
      have_upper = true;
    } else {
      sol.lower = current;
    }
    if (have_upper) {
      sol.gap = bracket_gap(sol.lower, sol.upper);
      if (sol.gap <= opts.tol) {
        sol.converged = true;
        break;
      }
    }
  }
  return sol;
}

CavitySolution solve_cavity_from(const Network& net, double t,
                                 const Configuration& x0, SolveOptions opts) {
  check_activity(t);
  check_tol(opts.tol);
  check_configuration(net, x0);
  const std::size_t max_iters = resolve_max_iters(net, opts);

  CavitySolution sol;
  sol.t = t;
  Configuration current = x0;
  sol.gap = kInf;
  if (net.n_arcs() == 0) {
    sol.converged = true;
    sol.gap = 0.0;
  }
  while (!sol.converged && sol.iterations < max_iters) {
    Configuration next = cavity_update(net, current, t);
    ++sol.iterations;
    sol.gap = bracket_gap(next, current);
    current = std::move(next);
    if (sol.gap <= opts.tol) sol.converged = true;
  }
  sol.lower = current;
  sol.upper = std::move(current);
  return sol;
}

CavitySolution solve_infinite_activity(const Network& net, SolveOptions opts) {
  check_tol(opts.tol);
  const std::size_t max_iters = resolve_max_iters(net, opts);

  CavitySolution sol;
  sol.t = kInf;
  const int n_arcs = net.n_arcs();
  sol.lower.assign(static_cast<std::size_t>(n_arcs), 0.0);
  sol.upper = sol.lower;
  if (n_arcs == 0) {
    sol.converged = true;
    return sol;
  }
  sol.gap = kInf;

  std::vector<double> field;
  // Finite-ratio sweep: the bounded companion value on every arc.
  auto ratio_sweep = [&](const Configuration& z) {
    Configuration p(static_cast<std::size_t>(n_arcs));
    for (int a = 0; a < n_arcs; ++a) {
      gather_inputs(z, net.arc_inputs(a), field);
      const LocalMeasure& mu = net.measure(net.arc_source(a));
      double value = cavity_ratio(mu, net.arc_element(a), field);
      if (is_infinite(value)) {
        throw std::domain_error(
            "unbounded cavity ratio at arc " + std::to_string(a) +
            "; the infinite-activity solve needs cavity-monotone measures");
      }
      p[static_cast<std::size_t>(a)] = value;
    }
    return p;
  };
  // Growth-rate sweep: the large-activity scaling limit of the messages.
  auto growth_sweep = [&](const Configuration& p) {
    Configuration z(static_cast<std::size_t>(n_arcs));
    for (int a = 0; a < n_arcs; ++a) {
      gather_inputs(p, net.arc_inputs(a), field);
      const LocalMeasure& mu = net.measure(net.arc_source(a));
      z[static_cast<std::size_t>(a)] =
          infinite_cavity_ratio(mu, net.arc_element(a), field);
    }
    return z;
  };

  const Configuration bottom(static_cast<std::size_t>(n_arcs), 0.0);
  const Configuration top(static_cast<std::size_t>(n_arcs), kInf);
  Configuration p_hi = ratio_sweep(bottom);
  Configuration p_lo = ratio_sweep(top);
  while (sol.iterations < max_iters) {
    sol.lower = growth_sweep(p_hi);
    sol.upper = growth_sweep(p_lo);
    ++sol.iterations;
    double gap = 0.0;
    for (int a = 0; a < n_arcs; ++a) {
      gap = std::max(gap, compact_gap(sol.lower[static_cast<std::size_t>(a)],
                                      sol.upper[static_cast<std::size_t>(a)]));
    }
    sol.gap = gap;
    if (gap <= opts.tol) {
      sol.converged = true;
      break;
    }
    p_hi = ratio_sweep(sol.lower);
    p_lo = ratio_sweep(sol.upper);
  }
  return sol;
}

EnergyReport energy_at(const Network& net, const CavitySolution& sol) {
  if (is_infinite(sol.t)) {
    throw std::invalid_argument(
        "energy_at needs a finite-activity solution; use rank_estimate for "
        "the infinite-activity regime");
  }
  if (!sol.converged) {
    throw std::invalid_argument("energy_at requires a converged solution");
  }
  check_configuration(net, sol.lower);
  check_configuration(net, sol.upper);

  const Configuration x = sol.midpoint();
  for (double value : x) {
    if (is_infinite(value)) {
      throw std::domain_error(
          "energy_at requires finite messages at finite activity");
    }
  }

  EnergyReport report;
  report.per_vertex.resize(static_cast<std::size_t>(net.n_vertices()));
  report.per_edge.resize(static_cast<std::size_t>(net.n_edges()));

  std::vector<double> field;
  KahanSum vertex_sum;
  for (int v = 0; v < net.n_vertices(); ++v) {
    gather_incoming(net, x, v, field);
    double u = energy(net.measure(v), field);
    report.per_vertex[static_cast<std::size_t>(v)] = u;
    vertex_sum.add(u);
  }
  report.total = 0.5 * vertex_sum.value();

  KahanSum edge_sum;
  for (int e = 0; e < net.n_edges(); ++e) {
    double product = x[static_cast<std::size_t>(2 * e)] *
                     x[static_cast<std::size_t>(2 * e + 1)];
    double p = product / (sol.t + product);
    report.per_edge[static_cast<std::size_t>(e)] = p;
    edge_sum.add(p);
  }
  report.edge_total = edge_sum.value();

  report.rel_gap = std::abs(report.total - report.edge_total) /
                   std::max(1.0, std::abs(report.total));
  if (report.rel_gap > kEnergyIdentityTol) {
    throw std::logic_error(
        "energy identity violated: vertex form " +
        std::to_string(report.total) + " vs edge form " +
        std::to_string(report.edge_total));
  }
  return report;
}

std::vector<double> bp_marginal(const Network& net, const CavitySolution& sol,
                                int vertex) {
  if (is_infinite(sol.t)) {
    throw std::invalid_argument("bp_marginal needs a finite-activity solution");
  }
  if (!sol.converged) {
    throw std::invalid_argument("bp_marginal requires a converged solution");
  }
  const int degree = net.degree(vertex);
  if (degree > 20) {
    throw std::length_error("bp_marginal caps vertex degree at 20, got " +
                            std::to_string(degree));
  }
  const Configuration x = sol.midpoint();
  std::vector<double> incoming;
  gather_incoming(net, x, vertex, incoming);
  for (double value : incoming) {
    if (is_infinite(value)) {
      throw std::domain_error("bp_marginal requires finite messages");
    }
  }

  const LocalMeasure& mu = net.measure(vertex);
  std::vector<double> mass(std::size_t{1} << degree, 0.0);
  double z = 0.0;
  for (std::uint32_t mask = 0; mask < mass.size(); ++mask) {
    double term = mu.evaluate(mask);
    if (term == 0.0) continue;
    for (std::uint32_t bits = mask; bits != 0; bits &= bits - 1) {
      term *= incoming[static_cast<std::size_t>(std::countr_zero(bits))];
    }
    mass[mask] = term;
    z += term;
  }
  if (!(z > 0.0)) {
    throw std::domain_error("local marginal normalization vanished");
  }
  for (double& p : mass) p /= z;
  return mass;
}

double edge_probability(const Network& net, const CavitySolution& sol,
                        int edge) {
  if (is_infinite(sol.t)) {
    throw std::invalid_argument(
        "edge_probability needs a finite-activity solution");
  }
  if (edge < 0 || edge >= net.n_edges()) {
    throw std::invalid_argument("edge index " + std::to_string(edge) +
                                " outside 0.." +
                                std::to_string(net.n_edges() - 1));
  }
  const Configuration x = sol.midpoint();
  double product = x[static_cast<std::size_t>(2 * edge)] *
                   x[static_cast<std::size_t>(2 * edge + 1)];
  return product / (sol.t + product);
}

namespace {

// Sum over edges of the two endpoint amplitudes' product: the slope of the
// rigorous small-activity envelope of the energy.
double amplitude_slope(const Network& net) {
  KahanSum slope;
  for (const auto& [u, v] : net.edges()) {
    slope.add(net.measure(u).amplitude() * net.measure(v).amplitude());
  }
  return slope.value();
}

template <typename F>
double adaptive_simpson_step(F& f, double a, double b, double fa, double fm,
                             double fb, double whole, double eps, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m);
  double rm = 0.5 * (m + b);
  double flm = f(lm);
  double frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * eps) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_step(f, a, m, fa, flm, fm, left, 0.5 * eps,
                               depth - 1) +
         adaptive_simpson_step(f, m, b, fm, frm, fb, right, 0.5 * eps,
                               depth - 1);
}

template <typename F>
double adaptive_simpson(F& f, double a, double b, double eps) {
  double fa = f(a);
  double fb = f(b);
  double fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_step(f, a, b, fa, fm, fb, whole, eps, 24);
}

}  // namespace

FreeEntropyReport free_entropy(const Network& net, double t, double tol) {
  check_activity(t);
  check_tol(tol);
  const int n = net.n_vertices();
  if (n == 0) {
    throw std::invalid_argument("free entropy needs at least one vertex");
  }
  KahanSum base;
  for (int v = 0; v < n; ++v) {
    double empty = net.measure(v).empty_weight();
    if (!(empty > 0.0)) {
      throw std::domain_error("vertex " + std::to_string(v) +
                              " gives the empty set zero weight");
    }
    base.add(std::log(empty));
  }

  FreeEntropyReport report;
  const double slope = amplitude_slope(net);
  double delta = t;
  if (slope > 0.0) {
    delta = std::min(t, 0.5 * tol * static_cast<double>(n) / slope);
  }
  report.split_point = delta;
  report.tail_bound = delta * slope / static_cast<double>(n);
  report.value = base.value() / static_cast<double>(n);
  if (delta >= t) {
    return report;
  }

  SolveOptions inner;
  inner.tol = std::min(1e-10, tol / 100.0);
  inner.max_iters = resolve_max_iters(net, SolveOptions{});
  auto integrand = [&](double theta) {
    double s = std::exp(theta);
    CavitySolution sol = solve_cavity(net, s, inner);
    if (!sol.converged) {
      throw std::runtime_error(
          "cavity solver did not converge at activity " + std::to_string(s) +
          " during free-entropy quadrature");
    }
    ++report.energy_evaluations;
    return energy_at(net, sol).total / static_cast<double>(n);
  };
  report.value += adaptive_simpson(integrand, std::log(delta), std::log(t),
                                   0.5 * tol);
  return report;
}

double rank_estimate(const Network& net, const CavitySolution& sol) {
  if (!is_infinite(sol.t)) {
    throw std::invalid_argument(
        "rank_estimate needs an infinite-activity solution");
  }
  check_configuration(net, sol.lower);
  KahanSum total;
  std::vector<double> field;
  for (int v = 0; v < net.n_vertices(); ++v) {
    gather_incoming(net, sol.lower, v, field);
    total.add(energy(net.measure(v), field));
  }
  return 0.5 * total.value();
}

EnergyBounds energy_bounds(const Network& net, double t) {
  check_activity(t);
  EnergyBounds bounds;
  bounds.small_t_upper = t * amplitude_slope(net);
  if (t > 1.0) {
    double max_size;
    if (net.n_edges() <= 24) {
      max_size = static_cast<double>(exact_M(net));
    } else {
      max_size = rank_estimate(net, solve_infinite_activity(net));
    }
    KahanSum log_amplitudes;
    for (int v = 0; v < net.n_vertices(); ++v) {
      log_amplitudes.add(std::log(net.measure(v).amplitude()));
    }
    bounds.large_t_lower =
        max_size - (static_cast<double>(net.n_edges()) * std::log(2.0) +
                    log_amplitudes.value()) /
                       std::log(t);
  } else {
    bounds.large_t_lower = -kInf;
  }
  return bounds;
}

}
