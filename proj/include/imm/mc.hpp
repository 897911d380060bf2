#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <thread>
#include <vector>

#include "imm/error.hpp"
#include "imm/graph.hpp"
#include "imm/random.hpp"

namespace imm {

struct SpreadEstimate {
  double mean = 0;
  double std_err = 0;
  std::size_t runs = 0;
};

// One forward IC cascade from `seeds`: every newly activated node flips each
// out-edge once. Returns the number of activated nodes.
inline std::size_t simulate_cascade(const Graph& g, std::span<const NodeId> seeds, Stream& stream,
                                    std::vector<char>& active, std::vector<NodeId>& frontier) {
  frontier.clear();
  for (NodeId s : seeds) {
    if (!active[s]) {
      active[s] = 1;
      frontier.push_back(s);
    }
  }
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    for (const Arc& a : g.out_arcs(frontier[head])) {
      if (active[a.node]) continue;
      if (stream.bernoulli(a.p)) {
        active[a.node] = 1;
        frontier.push_back(a.node);
      }
    }
  }
  for (NodeId v : frontier) active[v] = 0;
  return frontier.size();
}

// Monte Carlo estimate of sigma(seeds). Run r draws from stream (seed, r), so
// the result is identical for any thread count.
inline SpreadEstimate estimate_spread(const Graph& g, std::span<const NodeId> seeds, std::size_t runs,
                                      std::uint64_t seed, unsigned threads = 1) {
  if (runs == 0) throw DomainError("runs must be >= 1");
  for (NodeId s : seeds) {
    if (s >= g.node_count()) throw BoundsError("seed id " + std::to_string(s) + " >= n");
  }
  // Integer accumulators make the reduction exact and order-insensitive.
  struct Acc {
    std::uint64_t sum = 0;
    std::uint64_t sum_sq = 0;
  };
  auto work = [&](std::size_t lo, std::size_t hi, Acc& acc) {
    std::vector<char> active(g.node_count(), 0);
    std::vector<NodeId> frontier;
    for (std::size_t r = lo; r < hi; ++r) {
      Stream stream(seed, r);
      const std::uint64_t c = simulate_cascade(g, seeds, stream, active, frontier);
      acc.sum += c;
      acc.sum_sq += c * c;
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(threads, 1, runs);
  std::vector<Acc> parts(workers);
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (runs + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t lo = w * chunk, hi = std::min(runs, lo + chunk);
      if (lo >= hi) break;
      if (workers == 1) {
        work(lo, hi, parts[w]);
      } else {
        pool.emplace_back([&, lo, hi, w] { work(lo, hi, parts[w]); });
      }
    }
  }
  Acc total;
  for (const Acc& a : parts) {
    total.sum += a.sum;
    total.sum_sq += a.sum_sq;
  }

  SpreadEstimate est;
  est.runs = runs;
  const double r = static_cast<double>(runs);
  est.mean = static_cast<double>(total.sum) / r;
  if (runs > 1) {
    const double var = (static_cast<double>(total.sum_sq) - r * est.mean * est.mean) / (r - 1.0);
    est.std_err = std::sqrt(std::max(0.0, var) / r);
  }
  return est;
}

}  // namespace imm
