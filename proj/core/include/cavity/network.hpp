#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cavity/measure.hpp"

namespace cavity {

// Messages indexed by directed arc; entries in [0, inf].
using Configuration = std::vector<double>;

// Finite simple graph with one local measure per vertex whose ground set is
// the vertex's incident-edge list in adjacency order (neighbors ascending).
// Edges are normalized to (low, high) and sorted lexicographically at
// construction, so edge and arc indices are canonical for a given graph.
// Arc 2e points low -> high, arc 2e+1 the reverse; reverse_arc is XOR 1.
// Immutable after construction.
class Network {
 public:
  Network(int n_vertices, std::vector<std::pair<int, int>> edges,
          std::vector<LocalMeasure> measures);

  int n_vertices() const { return n_; }
  int n_edges() const { return static_cast<int>(edges_.size()); }
  int n_arcs() const { return 2 * n_edges(); }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const LocalMeasure& measure(int v) const;

  int degree(int v) const;
  // Slot s in 0..degree(v)-1 walks v's incident edges, neighbors ascending.
  int neighbor_at(int v, int slot) const;
  int edge_at(int v, int slot) const;

  int arc_source(int a) const;
  int arc_target(int a) const;
  static int reverse_arc(int a) { return a ^ 1; }
  // Arc neighbor -> v at v's slot (the message v hears on that edge).
  int arc_into(int v, int slot) const;
  // Arc v -> neighbor at v's slot.
  int arc_out_of(int v, int slot) const { return arc_into(v, slot) ^ 1; }
  // Slot of arc a's edge within its source vertex's ground set.
  int arc_element(int a) const;
  // Incoming arcs at v in slot order; the field order every per-vertex
  // measure operation expects.
  std::span<const int> incoming_arcs(int v) const;
  // Arcs k -> i feeding the update of a = (i -> j): incoming arcs at i in
  // slot order with the arc over a's own edge excised.
  std::span<const int> arc_inputs(int a) const;

 private:
  int n_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<LocalMeasure> measures_;
  std::vector<int> adj_offset_;      // size n+1
  std::vector<int> adj_edge_;        // edge index per (vertex, slot)
  std::vector<int> incoming_;       // incoming arc per (vertex, slot)
  std::vector<int> arc_element_;    // per arc
  std::vector<int> input_offset_;   // size n_arcs+1
  std::vector<int> inputs_;         // flat arc_inputs storage
};

// Parses the JSON network format:
//   {"vertices":[{"id":0,"measure":{...}},...],"edges":[[0,1],...]}
// with measures {"type":"bmatching","b":2}, {"type":"exchangeable",
// "coeffs":[...]}, or {"type":"table","entries":[{"subset":[slots],
// "weight":w},...]}. Table subsets index the vertex's incident-edge list in
// adjacency order. Throws std::invalid_argument naming the offending vertex
// or edge.
Network load_network(const std::string& json_text);

// Canonical form: vertices ascending, edges lexicographic, floats with up to
// 17 significant digits. load(save(net)) reproduces save(net) byte for byte.
std::string save_network(const Network& net);

// True iff the subgraph induced by the radius-r ball around root is acyclic.
bool ball_is_tree(const Network& net, int root, int radius);

// Longest finite BFS distance; the max over components when disconnected.
int diameter(const Network& net);

// Connected and |E| = |V| - 1.
bool is_tree(const Network& net);

// histogram[d] = number of vertices of degree d.
std::vector<int> degree_histogram(const Network& net);

}
