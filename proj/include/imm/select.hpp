#pragma once

#include <cstdint>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "imm/error.hpp"
#include "imm/graph.hpp"
#include "imm/rr.hpp"

namespace imm {

struct SeedResult {
  std::vector<NodeId> seeds;                  // pick order
  std::vector<std::size_t> marginal_counts;   // newly covered sets per pick
  std::vector<double> marginal_gains;         // marginal_counts / theta
  std::size_t covered = 0;                    // sets covered by all seeds
  std::size_t theta = 0;
  double coverage = 0.0;                      // covered / theta
  bool clamped = false;                       // k was larger than n
  std::string warning;
};

namespace detail {

inline SeedResult start_result(std::span<const RRSet> prefix, std::size_t& k, NodeId n) {
  if (k == 0) throw DomainError("k must be >= 1");
  if (prefix.empty()) throw DomainError("node selection needs a nonempty RR collection");
  SeedResult out;
  out.theta = prefix.size();
  if (k > n) {
    out.clamped = true;
    out.warning = "k=" + std::to_string(k) + " exceeds n=" + std::to_string(n) + "; clamped to n";
    k = n;
  }
  out.seeds.reserve(k);
  return out;
}

inline void record_pick(SeedResult& out, NodeId v, std::size_t gain) {
  out.seeds.push_back(v);
  out.marginal_counts.push_back(gain);
  out.marginal_gains.push_back(static_cast<double>(gain) / static_cast<double>(out.theta));
  out.covered += gain;
  out.coverage = static_cast<double>(out.covered) / static_cast<double>(out.theta);
}

}  // namespace detail

// Reference greedy max-coverage: k full scans, ties to the lowest node id.
inline SeedResult naive_node_selection(std::span<const RRSet> prefix, std::size_t k, NodeId n) {
  SeedResult out = detail::start_result(prefix, k, n);
  const CoverageIndex index(prefix, n);
  std::vector<char> set_covered(prefix.size(), 0);
  std::vector<char> chosen(n, 0);
  for (std::size_t pick = 0; pick < k; ++pick) {
    NodeId best = n;
    std::size_t best_gain = 0;
    for (NodeId v = 0; v < n; ++v) {
      if (chosen[v]) continue;
      std::size_t gain = 0;
      for (auto id : index.sets_containing(v)) gain += !set_covered[id];
      if (best == n || gain > best_gain) {
        best = v;
        best_gain = gain;
      }
    }
    chosen[best] = 1;
    for (auto id : index.sets_containing(best)) set_covered[id] = 1;
    detail::record_pick(out, best, best_gain);
  }
  return out;
}

// NodeSelection: greedy k-max-coverage over an RR prefix with lazy (CELF)
// re-evaluation. Produces exactly the naive greedy's picks, ties included:
// the queue orders by (gain desc, id asc), and a popped node is accepted only
// if its refreshed key still beats the top's stale upper bound.
inline SeedResult node_selection(std::span<const RRSet> prefix, std::size_t k, NodeId n) {
  SeedResult out = detail::start_result(prefix, k, n);
  const CoverageIndex index(prefix, n);
  std::vector<char> set_covered(prefix.size(), 0);

  struct Entry {
    std::size_t gain;
    NodeId node;
    bool operator<(const Entry& o) const {  // max-heap on (gain, -node)
      return gain != o.gain ? gain < o.gain : node > o.node;
    }
  };
  std::vector<Entry> init;
  init.reserve(n);
  for (NodeId v = 0; v < n; ++v) init.push_back({index.sets_containing(v).size(), v});
  std::priority_queue<Entry> heap(std::less<Entry>{}, std::move(init));

  auto fresh_gain = [&](NodeId v) {
    std::size_t g = 0;
    for (auto id : index.sets_containing(v)) g += !set_covered[id];
    return g;
  };

  while (out.seeds.size() < k) {
    Entry top = heap.top();
    heap.pop();
    top.gain = fresh_gain(top.node);
    if (!heap.empty() && top < heap.top()) {
      heap.push(top);
      continue;
    }
    for (auto id : index.sets_containing(top.node)) set_covered[id] = 1;
    detail::record_pick(out, top.node, top.gain);
  }
  return out;
}

}  // namespace imm
