#include "cavity/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cavity/numeric.hpp"

namespace cavity {

namespace {

constexpr int kEdgeCap = 24;

void check_edge_cap(const Network& net) {
  if (net.n_edges() > kEdgeCap) {
    throw std::length_error("exact enumeration supports up to " +
                            std::to_string(kEdgeCap) + " edges, got " +
                            std::to_string(net.n_edges()));
  }
}

// Precomputed walk order for the subset enumeration.
struct EnumPlan {
  std::vector<int> low_slot;                // per edge, slot at low endpoint
  std::vector<int> high_slot;               // per edge, slot at high endpoint
  std::vector<std::vector<int>> finishing;  // vertices whose last edge is e
  std::vector<int> rank;                    // per vertex
  double base_weight = 1.0;                 // deg-0 vertices' empty weights
};

EnumPlan build_plan(const Network& net) {
  EnumPlan plan;
  const int m = net.n_edges();
  plan.low_slot.resize(static_cast<std::size_t>(m));
  plan.high_slot.resize(static_cast<std::size_t>(m));
  plan.finishing.resize(static_cast<std::size_t>(m));
  plan.rank.resize(static_cast<std::size_t>(net.n_vertices()));

  std::vector<int> last_edge(static_cast<std::size_t>(net.n_vertices()), -1);
  for (int v = 0; v < net.n_vertices(); ++v) {
    plan.rank[static_cast<std::size_t>(v)] = net.measure(v).rank();
    for (int s = 0; s < net.degree(v); ++s) {
      int e = net.edge_at(v, s);
      last_edge[static_cast<std::size_t>(v)] =
          std::max(last_edge[static_cast<std::size_t>(v)], e);
      const auto& [lo, hi] = net.edges()[static_cast<std::size_t>(e)];
      if (v == lo) {
        plan.low_slot[static_cast<std::size_t>(e)] = s;
      } else {
        (void)hi;
        plan.high_slot[static_cast<std::size_t>(e)] = s;
      }
    }
    if (net.degree(v) == 0) {
      plan.base_weight *= net.measure(v).empty_weight();
    } else {
      plan.finishing[static_cast<std::size_t>(last_edge[static_cast<std::size_t>(
                         v)])]
          .push_back(v);
    }
  }
  return plan;
}

// Depth-first enumeration over edge subsets, visiting every F with positive
// total weight as visit(edge_mask, weight). Vertex weights are multiplied in
// exactly once, at the vertex's last incident edge, which is the earliest
// sound point for measures whose weights are not monotone in the subset.
template <typename Visitor>
void for_each_feasible(const Network& net, Visitor&& visit) {
  check_edge_cap(net);
  const EnumPlan plan = build_plan(net);
  const int m = net.n_edges();
  std::vector<std::uint32_t> vertex_mask(
      static_cast<std::size_t>(net.n_vertices()), 0);
  std::vector<int> vertex_count(static_cast<std::size_t>(net.n_vertices()), 0);

  auto recurse = [&](auto&& self, int e, std::uint32_t edge_mask,
                     double weight) -> void {
    if (e == m) {
      visit(edge_mask, weight);
      return;
    }
    const auto& [u, v] = net.edges()[static_cast<std::size_t>(e)];

    auto descend = [&](bool include) {
      double w = weight;
      if (include) {
        vertex_mask[static_cast<std::size_t>(u)] |=
            1u << plan.low_slot[static_cast<std::size_t>(e)];
        vertex_mask[static_cast<std::size_t>(v)] |=
            1u << plan.high_slot[static_cast<std::size_t>(e)];
        ++vertex_count[static_cast<std::size_t>(u)];
        ++vertex_count[static_cast<std::size_t>(v)];
      }
      bool alive = true;
      if (include &&
          (vertex_count[static_cast<std::size_t>(u)] >
               plan.rank[static_cast<std::size_t>(u)] ||
           vertex_count[static_cast<std::size_t>(v)] >
               plan.rank[static_cast<std::size_t>(v)])) {
        alive = false;
      }
      if (alive) {
        for (int fv : plan.finishing[static_cast<std::size_t>(e)]) {
          w *= net.measure(fv).evaluate(
              vertex_mask[static_cast<std::size_t>(fv)]);
          if (w == 0.0) {
            alive = false;
            break;
          }
        }
      }
      if (alive) {
        self(self, e + 1,
             include ? (edge_mask | (1u << e)) : edge_mask, w);
      }
      if (include) {
        vertex_mask[static_cast<std::size_t>(u)] &=
            ~(1u << plan.low_slot[static_cast<std::size_t>(e)]);
        vertex_mask[static_cast<std::size_t>(v)] &=
            ~(1u << plan.high_slot[static_cast<std::size_t>(e)]);
        --vertex_count[static_cast<std::size_t>(u)];
        --vertex_count[static_cast<std::size_t>(v)];
      }
    };

    descend(false);
    descend(true);
  };

  recurse(recurse, 0, 0u, plan.base_weight);
}

}  // namespace

int PartitionPolynomial::max_rank() const {
  for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k) {
    if (coeffs[static_cast<std::size_t>(k)] > 0.0) return k;
  }
  return 0;
}

PartitionPolynomial partition_polynomial(const Network& net) {
  std::vector<KahanSum> sums(static_cast<std::size_t>(net.n_edges()) + 1);
  for_each_feasible(net, [&](std::uint32_t edge_mask, double weight) {
    sums[static_cast<std::size_t>(std::popcount(edge_mask))].add(weight);
  });
  PartitionPolynomial poly;
  poly.coeffs.reserve(sums.size());
  for (const KahanSum& s : sums) poly.coeffs.push_back(s.value());
  return poly;
}

double exact_energy(const PartitionPolynomial& poly, double t) {
  if (t < 0.0 || std::isnan(t)) {
    throw std::invalid_argument("activity t must be nonnegative");
  }
  double log_t = std::log(t);
  double peak = -kInf;
  for (std::size_t k = 0; k < poly.coeffs.size(); ++k) {
    if (poly.coeffs[k] <= 0.0) continue;
    double lt = std::log(poly.coeffs[k]) +
                (k > 0 ? static_cast<double>(k) * log_t : 0.0);
    peak = std::max(peak, lt);
  }
  if (peak == -kInf) {
    throw std::invalid_argument("partition polynomial is identically zero");
  }
  double mass = 0.0;
  double size_mass = 0.0;
  for (std::size_t k = 0; k < poly.coeffs.size(); ++k) {
    if (poly.coeffs[k] <= 0.0) continue;
    double lt = std::log(poly.coeffs[k]) +
                (k > 0 ? static_cast<double>(k) * log_t : 0.0);
    double w = std::exp(lt - peak);
    mass += w;
    size_mass += static_cast<double>(k) * w;
  }
  return size_mass / mass;
}

double exact_log_z(const PartitionPolynomial& poly, double t) {
  if (t < 0.0 || std::isnan(t)) {
    throw std::invalid_argument("activity t must be nonnegative");
  }
  double log_t = std::log(t);
  double result = -kInf;
  for (std::size_t k = 0; k < poly.coeffs.size(); ++k) {
    if (poly.coeffs[k] <= 0.0) continue;
    double lt = std::log(poly.coeffs[k]) +
                (k > 0 ? static_cast<double>(k) * log_t : 0.0);
    result = log_sum_exp(result, lt);
  }
  return result;
}

double exact_log_z(const Network& net, double t) {
  return exact_log_z(partition_polynomial(net), t);
}

int exact_M(const Network& net) {
  return partition_polynomial(net).max_rank();
}

std::vector<std::vector<double>> exact_all_marginals(const Network& net,
                                                     double t) {
  if (t < 0.0 || std::isnan(t) || is_infinite(t)) {
    throw std::invalid_argument("activity t must be finite and nonnegative");
  }
  const int n = net.n_vertices();
  std::vector<std::vector<double>> mass(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    mass[static_cast<std::size_t>(v)].assign(std::size_t{1} << net.degree(v),
                                             0.0);
  }
  // Local mask per vertex for the current edge subset, maintained per visit.
  std::vector<std::uint32_t> local(static_cast<std::size_t>(n), 0);
  double z = 0.0;
  for_each_feasible(net, [&](std::uint32_t edge_mask, double weight) {
    double term = weight * std::pow(t, std::popcount(edge_mask));
    if (term == 0.0) return;
    z += term;
    std::fill(local.begin(), local.end(), 0u);
    for (std::uint32_t bits = edge_mask; bits != 0; bits &= bits - 1) {
      int e = std::countr_zero(bits);
      const auto& [u, v] = net.edges()[static_cast<std::size_t>(e)];
      for (int s = 0; s < net.degree(u); ++s) {
        if (net.edge_at(u, s) == e) {
          local[static_cast<std::size_t>(u)] |= 1u << s;
          break;
        }
      }
      for (int s = 0; s < net.degree(v); ++s) {
        if (net.edge_at(v, s) == e) {
          local[static_cast<std::size_t>(v)] |= 1u << s;
          break;
        }
      }
    }
    for (int v = 0; v < n; ++v) {
      mass[static_cast<std::size_t>(v)][local[static_cast<std::size_t>(v)]] +=
          term;
    }
  });
  if (z <= 0.0) {
    throw std::invalid_argument("partition function vanished at this activity");
  }
  for (auto& table : mass) {
    for (double& p : table) p /= z;
  }
  return mass;
}

std::vector<double> exact_marginal(const Network& net, double t, int vertex) {
  if (vertex < 0 || vertex >= net.n_vertices()) {
    throw std::invalid_argument("vertex " + std::to_string(vertex) +
                                " outside 0.." +
                                std::to_string(net.n_vertices() - 1));
  }
  return exact_all_marginals(net, t)[static_cast<std::size_t>(vertex)];
}

std::vector<double> exact_all_edge_probabilities(const Network& net,
                                                 double t) {
  if (t < 0.0 || std::isnan(t) || is_infinite(t)) {
    throw std::invalid_argument("activity t must be finite and nonnegative");
  }
  std::vector<double> mass(static_cast<std::size_t>(net.n_edges()), 0.0);
  double z = 0.0;
  for_each_feasible(net, [&](std::uint32_t edge_mask, double weight) {
    double term = weight * std::pow(t, std::popcount(edge_mask));
    if (term == 0.0) return;
    z += term;
    for (std::uint32_t bits = edge_mask; bits != 0; bits &= bits - 1) {
      mass[static_cast<std::size_t>(std::countr_zero(bits))] += term;
    }
  });
  if (z <= 0.0) {
    throw std::invalid_argument("partition function vanished at this activity");
  }
  for (double& p : mass) p /= z;
  return mass;
}

double exact_edge_probability(const Network& net, double t, int edge) {
  if (edge < 0 || edge >= net.n_edges()) {
    throw std::invalid_argument("edge index " + std::to_string(edge) +
                                " outside 0.." +
                                std::to_string(net.n_edges() - 1));
  }
  return exact_all_edge_probabilities(net, t)[static_cast<std::size_t>(edge)];
}

double exact_root_energy(const Network& net, double t, int vertex) {
  std::vector<double> marginal = exact_marginal(net, t, vertex);
  double expectation = 0.0;
  for (std::size_t mask = 0; mask < marginal.size(); ++mask) {
    expectation += marginal[mask] *
                   std::popcount(static_cast<std::uint32_t>(mask));
  }
  return expectation;
}

}
