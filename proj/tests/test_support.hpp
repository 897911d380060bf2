#pragma once

#include <random>
#include <vector>

#include "imm/graph.hpp"
#include "imm/rr.hpp"

namespace imm::testing {

// Random simple-ish digraph (no self loops) with probabilities in [lo, hi].
inline Graph random_graph(NodeId n, std::size_t m, std::mt19937_64& rng, double lo = 0.1, double hi = 0.9) {
  std::uniform_int_distribution<NodeId> node(0, n - 1);
  std::uniform_real_distribution<double> prob(lo, hi);
  std::vector<Edge> edges;
  while (edges.size() < m) {
    const NodeId u = node(rng), v = node(rng);
    if (u != v) edges.push_back({u, v, prob(rng)});
  }
  return Graph(n, std::move(edges));
}

// Random RR-like collection: each set a nonempty random subset of [0, n).
inline std::vector<RRSet> random_sets(NodeId n, std::size_t theta, std::mt19937_64& rng, double density = 0.3) {
  std::bernoulli_distribution in(density);
  std::uniform_int_distribution<NodeId> node(0, n - 1);
  std::vector<RRSet> out(theta);
  for (auto& r : out) {
    r.root = node(rng);
    for (NodeId v = 0; v < n; ++v) {
      if (v == r.root || in(rng)) r.members.push_back(v);
    }
  }
  return out;
}

inline std::vector<RRSet> sets_of(std::initializer_list<std::initializer_list<NodeId>> lists) {
  std::vector<RRSet> out;
  for (auto l : lists) {
    RRSet r;
    r.members.assign(l.begin(), l.end());
    r.root = r.members.front();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace imm::testing
