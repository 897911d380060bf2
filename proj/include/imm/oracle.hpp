#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "imm/error.hpp"
#include "imm/graph.hpp"
#include "imm/params.hpp"
#include "imm/rr.hpp"

namespace imm {

// Exact ground truth by exhaustive enumeration on tiny instances.

inline constexpr std::size_t kOracleMaxEdges = 20;
inline constexpr double kOracleMaxSubsets = 1e6;
inline constexpr NodeId kOracleMaxNodes = 64;  // reachability kept as 64-bit masks

namespace detail {

inline void require_enumerable(const Graph& g) {
  if (g.edge_count() > kOracleMaxEdges) {
    throw OracleRefusal("exact oracle enumerates 2^m worlds; m=" + std::to_string(g.edge_count()) + " exceeds " +
                        std::to_string(kOracleMaxEdges));
  }
}

inline void require_subsets(NodeId n, std::size_t k) {
  if (k == 0 || k > n) throw DomainError("k must satisfy 1 <= k <= n");
  if (std::exp(log_binomial(n, static_cast<double>(k))) > kOracleMaxSubsets * (1 + 1e-9)) {
    throw OracleRefusal("C(" + std::to_string(n) + "," + std::to_string(k) + ") exceeds the subset budget of 1e6");
  }
}

inline double world_probability(std::span<const Edge> edges, std::uint64_t mask) {
  double p = 1.0;
  for (std::size_t e = 0; e < edges.size(); ++e) p *= (mask >> e) & 1 ? edges[e].p : 1.0 - edges[e].p;
  return p;
}

// reach[v] = bitmask of nodes reachable from v over the live edges of `mask`.
inline void forward_closure(NodeId n, std::span<const Edge> edges, std::uint64_t mask,
                            std::vector<std::uint64_t>& reach) {
  reach.assign(n, 0);
  for (NodeId v = 0; v < n; ++v) reach[v] = std::uint64_t{1} << v;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (!((mask >> e) & 1)) continue;
      const std::uint64_t merged = reach[edges[e].src] | reach[edges[e].dst];
      if (merged != reach[edges[e].src]) {
        reach[edges[e].src] = merged;
        changed = true;
      }
    }
  }
}

// Calls fn(subset) for every k-subset of [0, n) in lexicographic order.
template <class Fn>
void for_each_subset(NodeId n, std::size_t k, Fn&& fn) {
  std::vector<NodeId> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = static_cast<NodeId>(i);
  while (true) {
    fn(std::span<const NodeId>(idx));
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

// sigma(S) = sum over all 2^m live-edge worlds of Pr{world} * |reachable(S)|,
// each world explored by a plain BFS from S.
inline double exact_sigma(const Graph& g, std::span<const NodeId> seeds) {
  detail::require_enumerable(g);
  const NodeId n = g.node_count();
  for (NodeId s : seeds) {
    if (s >= n) throw BoundsError("seed id " + std::to_string(s) + " >= n");
  }
  const auto edges = g.edges();
  const std::uint64_t worlds = std::uint64_t{1} << edges.size();
  std::vector<char> active(n);
  std::vector<NodeId> queue;
  double sigma = 0.0;
  for (std::uint64_t mask = 0; mask < worlds; ++mask) {
    std::fill(active.begin(), active.end(), 0);
    queue.clear();
    for (NodeId s : seeds) {
      if (!active[s]) {
        active[s] = 1;
        queue.push_back(s);
      }
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
      for (std::size_t e = 0; e < edges.size(); ++e) {
        if (edges[e].src != queue[head] || !((mask >> e) & 1) || active[edges[e].dst]) continue;
        active[edges[e].dst] = 1;
        queue.push_back(edges[e].dst);
      }
    }
    sigma += detail::world_probability(edges, mask) * static_cast<double>(queue.size());
  }
  return sigma;
}

// n * Pr{S intersects a random RR set}, computed exactly by enumerating every
// (root, live-edge world) pair and reverse-searching from the root.
inline double exact_rr_spread(const Graph& g, std::span<const NodeId> seeds) {
  detail::require_enumerable(g);
  const NodeId n = g.node_count();
  std::vector<char> in_seed(n, 0);
  for (NodeId s : seeds) {
    if (s >= n) throw BoundsError("seed id " + std::to_string(s) + " >= n");
    in_seed[s] = 1;
  }
  const auto edges = g.edges();
  const std::uint64_t worlds = std::uint64_t{1} << edges.size();
  std::vector<char> seen(n);
  std::vector<NodeId> queue;
  double hit = 0.0;  // sum over roots and worlds of Pr{root} Pr{world} I{hit}
  for (NodeId root = 0; root < n; ++root) {
    for (std::uint64_t mask = 0; mask < worlds; ++mask) {
      std::fill(seen.begin(), seen.end(), 0);
      queue.assign(1, root);
      seen[root] = 1;
      bool covered = in_seed[root] != 0;
      for (std::size_t head = 0; head < queue.size() && !covered; ++head) {
        for (std::size_t e = 0; e < edges.size(); ++e) {
          if (edges[e].dst != queue[head] || !((mask >> e) & 1) || seen[edges[e].src]) continue;
          seen[edges[e].src] = 1;
          queue.push_back(edges[e].src);
          covered = covered || in_seed[edges[e].src];
        }
      }
      if (covered) hit += detail::world_probability(edges, mask) / static_cast<double>(n);
    }
  }
  return static_cast<double>(n) * hit;
}

struct ExactOpt {
  double value = 0;
  std::vector<NodeId> set;
};

// max over all k-subsets of sigma(S); ties (within 1e-9) go to the
// lexicographically smallest set.
inline ExactOpt exact_opt(const Graph& g, std::size_t k) {
  detail::require_enumerable(g);
  const NodeId n = g.node_count();
  if (n > kOracleMaxNodes) throw OracleRefusal("exact_opt supports at most 64 nodes");
  detail::require_subsets(n, k);

  std::vector<std::vector<NodeId>> subsets;
  detail::for_each_subset(n, k, [&](std::span<const NodeId> s) { subsets.emplace_back(s.begin(), s.end()); });
  std::vector<double> value(subsets.size(), 0.0);

  const auto edges = g.edges();
  const std::uint64_t worlds = std::uint64_t{1} << edges.size();
  std::vector<std::uint64_t> reach;
  for (std::uint64_t mask = 0; mask < worlds; ++mask) {
    const double p = detail::world_probability(edges, mask);
    if (p == 0.0) continue;
    detail::forward_closure(n, edges, mask, reach);
    for (std::size_t s = 0; s < subsets.size(); ++s) {
      std::uint64_t cover = 0;
      for (NodeId v : subsets[s]) cover |= reach[v];
      value[s] += p * std::popcount(cover);
    }
  }

  const double best = *std::max_element(value.begin(), value.end());
  ExactOpt out;
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    if (value[s] >= best - 1e-9) {
      out.value = value[s];
      out.set = subsets[s];
      break;
    }
  }
  return out;
}

struct MaxCoverage {
  double coverage = 0;      // best covered / theta
  std::size_t covered = 0;
  std::vector<NodeId> set;  // lexicographically smallest optimum
};

// Exact k-max-coverage over an RR prefix by trying every k-subset.
inline MaxCoverage exact_max_coverage(std::span<const RRSet> prefix, std::size_t k, NodeId n) {
  if (prefix.empty()) throw DomainError("coverage of an empty RR collection is undefined");
  detail::require_subsets(n, k);
  const std::size_t words = (prefix.size() + 63) / 64;
  std::vector<std::uint64_t> bits(static_cast<std::size_t>(n) * words, 0);
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    for (NodeId v : prefix[i].members) {
      if (v >= n) throw BoundsError("RR member id " + std::to_string(v) + " >= n");
      bits[v * words + i / 64] |= std::uint64_t{1} << (i % 64);
    }
  }
  MaxCoverage out;
  bool first = true;
  std::vector<std::uint64_t> acc(words);
  detail::for_each_subset(n, k, [&](std::span<const NodeId> s) {
    std::fill(acc.begin(), acc.end(), 0);
    for (NodeId v : s) {
      for (std::size_t w = 0; w < words; ++w) acc[w] |= bits[v * words + w];
    }
    std::size_t c = 0;
    for (auto w : acc) c += static_cast<std::size_t>(std::popcount(w));
    if (first || c > out.covered) {
      out.covered = c;
      out.set.assign(s.begin(), s.end());
      first = false;
    }
  });
  out.coverage = static_cast<double>(out.covered) / static_cast<double>(prefix.size());
  return out;
}

struct OracleReport {
  std::map<std::vector<NodeId>, double> exact_sigma;
  double opt_value = 0;
  std::vector<NodeId> opt_set;
  std::optional<double> coverage_opt;
};

// Bundles exact OPT with sigma of each queried set (and the exact coverage
// optimum when an RR prefix is supplied).
inline OracleReport oracle_report(const Graph& g, std::size_t k, std::span<const std::vector<NodeId>> queries,
                                  std::span<const RRSet> prefix = {}) {
  OracleReport r;
  const ExactOpt opt = exact_opt(g, k);
  r.opt_value = opt.value;
  r.opt_set = opt.set;
  for (const auto& q : queries) {
    auto key = q;
    std::sort(key.begin(), key.end());
    r.exact_sigma[key] = exact_sigma(g, key);
  }
  if (!prefix.empty()) r.coverage_opt = exact_max_coverage(prefix, k, g.node_count()).coverage;
  return r;
}

}  // namespace imm
