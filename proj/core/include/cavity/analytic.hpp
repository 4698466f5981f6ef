#pragma once

#include <vector>

#include "cavity/ensembles.hpp"

namespace cavity {

// Asymptotic description of a sparse random network: degree law plus a
// uniform per-vertex capacity.
struct LimitSpec {
  DegreeDistribution pi;
  int capacity = 1;

  double mean_degree() const { return pi.mean(); }
};

// k-th derivative of the degree generating function, sum over n of
// pi_n n!/(n-k)! s^(n-k), for s in [0,1].
double degree_gf_deriv(const DegreeDistribution& pi, int order, double s);

// Probability that a size-biased neighbor count, each retained independently
// with probability s, stays below the capacity. Non-increasing, maps [0,1]
// into [0,1].
double offspring_room(const LimitSpec& spec, double s);
double offspring_room_deriv(const LimitSpec& spec, double s);

// Probability that a pi-distributed count thinned by s stays at or below the
// capacity.
double vertex_room(const LimitSpec& spec, double s);

// Candidate per-vertex size density evaluated at a thinning level s, and its
// derivative (c/2) f'(s) (f(f(s)) - s) where f = offspring_room.
double size_density(const LimitSpec& spec, double s);
double size_density_deriv(const LimitSpec& spec, double s);

struct MinimaReport {
  std::vector<double> roots;       // fixed points of f(f(s)) = s in [0,1]
  std::vector<double> densities;   // size_density at each root
  std::vector<bool> historical;    // density strictly below everything before
  double min_density = 0.0;        // global minimum over [0,1]
  bool tangential_suspect = false; // near-tangencies the sign scan cannot
                                   // certify as roots
};

// Grid sign scan plus bisection for the fixed points of f∘f, with the
// historical-minimum census used to count stable population fixed points.
MinimaReport historical_minima(const LimitSpec& spec, int grid_n = 10000,
                               double tol = 1e-12);

// Closed-form asymptotic matching density for Poisson(c) degrees with unit
// capacity: 1 - (t + e^{-ct} + c t e^{-ct})/2 at the smallest root of
// t = exp(-c exp(-c t)).
double karp_sipser_density(double c);

}
