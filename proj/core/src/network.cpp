#include "cavity/network.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <string>

namespace cavity {

namespace {

std::string edge_name(const std::pair<int, int>& e) {
  return "[" + std::to_string(e.first) + "," + std::to_string(e.second) + "]";
}

}  // namespace

Network::Network(int n_vertices, std::vector<std::pair<int, int>> edges,
                 std::vector<LocalMeasure> measures)
    : n_(n_vertices), measures_(std::move(measures)) {
  if (n_ < 0) {
    throw std::invalid_argument("vertex count must be nonnegative");
  }
  for (auto& e : edges) {
    if (e.first < 0 || e.first >= n_ || e.second < 0 || e.second >= n_) {
      throw std::invalid_argument("edge " + edge_name(e) +
                                  " has an endpoint outside 0.." +
                                  std::to_string(n_ - 1));
    }
    if (e.first == e.second) {
      throw std::invalid_argument("edge " + edge_name(e) + " is a self-loop");
    }
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(edges.begin(), edges.end());
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i] == edges[i - 1]) {
      throw std::invalid_argument("parallel edge " + edge_name(edges[i]));
    }
  }
  edges_ = std::move(edges);

  if (static_cast<int>(measures_.size()) != n_) {
    throw std::invalid_argument("expected " + std::to_string(n_) +
                                " measures, got " +
                                std::to_string(measures_.size()));
  }

  std::vector<int> deg(static_cast<std::size_t>(n_), 0);
  for (const auto& e : edges_) {
    ++deg[static_cast<std::size_t>(e.first)];
    ++deg[static_cast<std::size_t>(e.second)];
  }
  for (int v = 0; v < n_; ++v) {
    if (measures_[static_cast<std::size_t>(v)].ground_size() !=
        deg[static_cast<std::size_t>(v)]) {
      throw std::invalid_argument(
          "vertex " + std::to_string(v) + " has degree " +
          std::to_string(deg[static_cast<std::size_t>(v)]) +
          " but its measure has ground size " +
          std::to_string(
              measures_[static_cast<std::size_t>(v)].ground_size()));
    }
  }

  // Adjacency in slot order. Edges are sorted by (low, high); filling low
  // endpoints in edge order gives ascending neighbors at every vertex only
  // after an explicit per-vertex sort by neighbor id.
  adj_offset_.assign(static_cast<std::size_t>(n_) + 1, 0);
  for (int v = 0; v < n_; ++v) {
    adj_offset_[static_cast<std::size_t>(v) + 1] =
        adj_offset_[static_cast<std::size_t>(v)] +
        deg[static_cast<std::size_t>(v)];
  }
  adj_edge_.assign(edges_.size() * 2, 0);
  std::vector<int> cursor(adj_offset_.begin(), adj_offset_.end() - 1);
  for (int e = 0; e < n_edges(); ++e) {
    const auto& [u, v] = edges_[static_cast<std::size_t>(e)];
    adj_edge_[static_cast<std::size_t>(cursor[static_cast<std::size_t>(u)]++)] =
        e;
    adj_edge_[static_cast<std::size_t>(cursor[static_cast<std::size_t>(v)]++)] =
        e;
  }
  for (int v = 0; v < n_; ++v) {
    auto begin = adj_edge_.begin() + adj_offset_[static_cast<std::size_t>(v)];
    auto end = adj_edge_.begin() + adj_offset_[static_cast<std::size_t>(v) + 1];
    std::sort(begin, end, [&](int a, int b) {
      const auto& ea = edges_[static_cast<std::size_t>(a)];
      const auto& eb = edges_[static_cast<std::size_t>(b)];
      int na = ea.first == v ? ea.second : ea.first;
      int nb = eb.first == v ? eb.second : eb.first;
      return na < nb;
    });
  }

  incoming_.assign(adj_edge_.size(), 0);
  for (int v = 0; v < n_; ++v) {
    for (int s = 0; s < deg[static_cast<std::size_t>(v)]; ++s) {
      int e = edge_at(v, s);
      const auto& [lo, hi] = edges_[static_cast<std::size_t>(e)];
      // Arc into v over edge e: 2e if sent by the low endpoint.
      int a = (v == hi) ? 2 * e : 2 * e + 1;
      incoming_[static_cast<std::size_t>(
          adj_offset_[static_cast<std::size_t>(v)] + s)] = a;
    }
  }

  arc_element_.assign(static_cast<std::size_t>(n_arcs()), 0);
  input_offset_.assign(static_cast<std::size_t>(n_arcs()) + 1, 0);
  for (int a = 0; a < n_arcs(); ++a) {
    int i = arc_source(a);
    input_offset_[static_cast<std::size_t>(a) + 1] =
        input_offset_[static_cast<std::size_t>(a)] + degree(i) - 1;
  }
  inputs_.assign(static_cast<std::size_t>(input_offset_.back()), 0);
  for (int a = 0; a < n_arcs(); ++a) {
    int i = arc_source(a);
    int e = a / 2;
    int pos = input_offset_[static_cast<std::size_t>(a)];
    int element = -1;
    for (int s = 0; s < degree(i); ++s) {
      if (edge_at(i, s) == e) {
        element = s;
      } else {
        inputs_[static_cast<std::size_t>(pos++)] = arc_into(i, s);
      }
    }
    arc_element_[static_cast<std::size_t>(a)] = element;
  }
}

const LocalMeasure& Network::measure(int v) const {
  if (v < 0 || v >= n_) {
    throw std::invalid_argument("vertex " + std::to_string(v) +
                                " outside 0.." + std::to_string(n_ - 1));
  }
  return measures_[static_cast<std::size_t>(v)];
}

int Network::degree(int v) const {
  if (v < 0 || v >= n_) {
    throw std::invalid_argument("vertex " + std::to_string(v) +
                                " outside 0.." + std::to_string(n_ - 1));
  }
  return adj_offset_[static_cast<std::size_t>(v) + 1] -
         adj_offset_[static_cast<std::size_t>(v)];
}

int Network::edge_at(int v, int slot) const {
  if (slot < 0 || slot >= degree(v)) {
    throw std::invalid_argument("slot " + std::to_string(slot) +
                                " outside vertex " + std::to_string(v) +
                                "'s degree " + std::to_string(degree(v)));
  }
  return adj_edge_[static_cast<std::size_t>(
      adj_offset_[static_cast<std::size_t>(v)] + slot)];
}

int Network::neighbor_at(int v, int slot) const {
  const auto& e = edges_[static_cast<std::size_t>(edge_at(v, slot))];
  return e.first == v ? e.second : e.first;
}

int Network::arc_source(int a) const {
  const auto& e = edges_[static_cast<std::size_t>(a / 2)];
  return (a & 1) ? e.second : e.first;
}

int Network::arc_target(int a) const {
  const auto& e = edges_[static_cast<std::size_t>(a / 2)];
  return (a & 1) ? e.first : e.second;
}

int Network::arc_into(int v, int slot) const {
  if (slot < 0 || slot >= degree(v)) {
    throw std::invalid_argument("slot " + std::to_string(slot) +
                                " outside vertex " + std::to_string(v) +
                                "'s degree " + std::to_string(degree(v)));
  }
  return incoming_[static_cast<std::size_t>(
      adj_offset_[static_cast<std::size_t>(v)] + slot)];
}

int Network::arc_element(int a) const {
  return arc_element_[static_cast<std::size_t>(a)];
}

std::span<const int> Network::incoming_arcs(int v) const {
  return {incoming_.data() + adj_offset_[static_cast<std::size_t>(v)],
          static_cast<std::size_t>(degree(v))};
}

std::span<const int> Network::arc_inputs(int a) const {
  return {inputs_.data() + input_offset_[static_cast<std::size_t>(a)],
          static_cast<std::size_t>(input_offset_[static_cast<std::size_t>(a) +
                                                 1] -
                                   input_offset_[static_cast<std::size_t>(a)])};
}

bool ball_is_tree(const Network& net, int root, int radius) {
  const int n = net.n_vertices();
  if (root < 0 || root >= n) {
    throw std::invalid_argument("root " + std::to_string(root) +
                                " outside 0.." + std::to_string(n - 1));
  }
  std::vector<int> dist(static_cast<std::size_t>(n), -1);
  std::queue<int> queue;
  dist[static_cast<std::size_t>(root)] = 0;
  queue.push(root);
  std::vector<int> ball{root};
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop();
    if (dist[static_cast<std::size_t>(v)] == radius) continue;
    for (int s = 0; s < net.degree(v); ++s) {
      int w = net.neighbor_at(v, s);
      if (dist[static_cast<std::size_t>(w)] < 0) {
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + 1;
        ball.push_back(w);
        queue.push(w);
      }
    }
  }
  // Union-find over induced edges; a repeated root means a cycle.
  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  for (int v : ball) parent[static_cast<std::size_t>(v)] = v;
  auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  };
  for (const auto& [u, v] : net.edges()) {
    if (dist[static_cast<std::size_t>(u)] < 0 ||
        dist[static_cast<std::size_t>(v)] < 0) {
      continue;
    }
    int ru = find(u);
    int rv = find(v);
    if (ru == rv) return false;
    parent[static_cast<std::size_t>(ru)] = rv;
  }
  return true;
}

namespace {

// BFS distances from source; -1 for unreachable.
std::vector<int> bfs_distances(const Network& net, int source) {
  std::vector<int> dist(static_cast<std::size_t>(net.n_vertices()), -1);
  std::queue<int> queue;
  dist[static_cast<std::size_t>(source)] = 0;
  queue.push(source);
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop();
    for (int s = 0; s < net.degree(v); ++s) {
      int w = net.neighbor_at(v, s);
      if (dist[static_cast<std::size_t>(w)] < 0) {
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + 1;
        queue.push(w);
      }
    }
  }
  return dist;
}

}  // namespace

int diameter(const Network& net) {
  int best = 0;
  for (int v = 0; v < net.n_vertices(); ++v) {
    std::vector<int> dist = bfs_distances(net, v);
    for (int d : dist) best = std::max(best, d);
  }
  return best;
}

bool is_tree(const Network& net) {
  const int n = net.n_vertices();
  if (n == 0) return true;
  if (net.n_edges() != n - 1) return false;
  std::vector<int> dist = bfs_distances(net, 0);
  return std::none_of(dist.begin(), dist.end(), [](int d) { return d < 0; });
}

std::vector<int> degree_histogram(const Network& net) {
  int max_degree = 0;
  for (int v = 0; v < net.n_vertices(); ++v) {
    max_degree = std::max(max_degree, net.degree(v));
  }
  std::vector<int> histogram(static_cast<std::size_t>(max_degree) + 1, 0);
  for (int v = 0; v < net.n_vertices(); ++v) {
    ++histogram[static_cast<std::size_t>(net.degree(v))];
  }
  return histogram;
}

}
