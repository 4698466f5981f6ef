#pragma once

#include <cstddef>
#include <vector>

#include "cavity/network.hpp"

namespace cavity {

struct SolveOptions {
  // 0 means 10 * diameter + 1000, resolved per solve.
  std::size_t max_iters = 0;
  double tol = 1e-10;
};

// Fixed-point report. The solver brackets the fixed point between the last
// even iterate (lower, climbing) and the last odd iterate (upper, falling);
// the bracket width is the honest error certificate on non-tree graphs.
struct CavitySolution {
  double t = 0.0;  // kInf for the infinite-activity solve
  Configuration lower;
  Configuration upper;
  double gap = 0.0;
  std::size_t iterations = 0;
  bool converged = false;

  // Arcwise midpoint of the bracket; the fixed-point estimate.
  Configuration midpoint() const;
};

// One synchronous message sweep: out[a] = t * ratio at a's source measure of
// the messages feeding a. Pure in (net, x, t).
Configuration cavity_update(const Network& net, const Configuration& x,
                            double t);

// Iterates from the all-zero configuration. Even iterates rise, odd iterates
// fall; stops when the bracket width (absolute for entries <= 1, relative
// above, infinite on an infinity mismatch) is at most tol.
CavitySolution solve_cavity(const Network& net, double t,
                            SolveOptions opts = {});

// Plain iteration from a caller-supplied start; stops on the step-to-step
// Cauchy gap. lower == upper == the final iterate.
CavitySolution solve_cavity_from(const Network& net, double t,
                                 const Configuration& x0,
                                 SolveOptions opts = {});

// Limit regime where the subgraph law concentrates on maximum-size feasible
// subgraphs. Runs the two-sided bracket of the composed map (finite-ratio
// step, then growth-rate step): the lower sequence climbs from the bottom
// configuration, the upper falls from the all-infinite one. The gap is
// measured after compactifying [0, inf] by x -> x/(1+x), so an infinity-
// pattern mismatch keeps the gap large. Entries of the result may be +inf.
CavitySolution solve_infinite_activity(const Network& net,
                                       SolveOptions opts = {});

// Mean subgraph size at the fixed point, computed both ways: per-vertex
// measure energies (halved) and the per-edge closed form. The two must agree
// to 1e-9 relative; disagreement throws std::logic_error.
struct EnergyReport {
  double total = 0.0;       // vertex form, the canonical value
  double edge_total = 0.0;  // edge form, the cross-check
  std::vector<double> per_vertex;
  std::vector<double> per_edge;
  double rel_gap = 0.0;
};

EnergyReport energy_at(const Network& net, const CavitySolution& sol);

// Probability vector over local subsets at `vertex`, indexed by slot mask:
// P(I) proportional to mu(I) * prod of incoming messages over I. Exact on
// trees. Finite t, degree <= 20.
std::vector<double> bp_marginal(const Network& net, const CavitySolution& sol,
                                int vertex);

// x_uv x_vu / (t + x_uv x_vu) at the fixed point.
double edge_probability(const Network& net, const CavitySolution& sol,
                        int edge);

// Log-partition estimate per vertex via thermodynamic integration: the
// energy integrand u(s)/s is integrated in log-activity with adaptive
// Simpson on [delta, t]; on [0, delta] the rigorous linear envelope of the
// energy bounds the contribution below tol/2 and is dropped.
struct FreeEntropyReport {
  double value = 0.0;
  double split_point = 0.0;       // delta
  double tail_bound = 0.0;        // certified bound on the dropped piece
  std::size_t energy_evaluations = 0;
};

FreeEntropyReport free_entropy(const Network& net, double t, double tol);

// Maximum-size estimate at infinite activity: half the sum of per-vertex
// energies fed by the lower envelope. Exact on trees.
double rank_estimate(const Network& net, const CavitySolution& sol);

// Rigorous two-sided controls on the energy: small_t_upper holds for any
// t > 0, large_t_lower for t > 1 (negative infinity reported otherwise).
// The maximum-size term uses the enumeration oracle when the graph is small
// enough, the infinite-activity estimate otherwise.
struct EnergyBounds {
  double small_t_upper = 0.0;
  double large_t_lower = 0.0;
};

EnergyBounds energy_bounds(const Network& net, double t);

}
