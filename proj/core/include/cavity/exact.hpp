#pragma once

#include <vector>

#include "cavity/network.hpp"

namespace cavity {

// Coefficients of the activity polynomial: coeffs[k] = total weight of the
// feasible spanning subgraphs with exactly k edges.
struct PartitionPolynomial {
  std::vector<double> coeffs;

  // Degree of the top nonzero coefficient: the maximum feasible subgraph
  // size. 0 for the all-empty polynomial edge case.
  int max_rank() const;
};

// Brute-force reference: enumerates edge subsets depth-first, multiplying in
// each vertex's weight once its last incident edge is decided and pruning
// branches whose per-vertex counts already exceed the measure's rank.
// Networks up to 24 edges.
PartitionPolynomial partition_polynomial(const Network& net);

// t Z'(t) / Z(t): the mean subgraph size at activity t >= 0.
double exact_energy(const PartitionPolynomial& poly, double t);

double exact_log_z(const PartitionPolynomial& poly, double t);
double exact_log_z(const Network& net, double t);

// Maximum feasible subgraph size.
int exact_M(const Network& net);

// Probability vector over local subsets at `vertex`, indexed by slot mask.
std::vector<double> exact_marginal(const Network& net, double t, int vertex);
std::vector<std::vector<double>> exact_all_marginals(const Network& net,
                                                     double t);

double exact_edge_probability(const Network& net, double t, int edge);
std::vector<double> exact_all_edge_probabilities(const Network& net, double t);

// Mean number of subgraph edges incident to `vertex` at activity t.
double exact_root_energy(const Network& net, double t, int vertex);

}
