#pragma once

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <vector>

#include "imm/graph.hpp"
#include "imm/params.hpp"
#include "imm/random.hpp"
#include "imm/rr.hpp"
#include "imm/select.hpp"

namespace imm {

struct IterationRecord {
  int i = 0;
  double x = 0;             // n / 2^i
  std::size_t theta = 0;    // ceil(lambda' / x)
  double coverage = 0;      // F of the greedy seeds on the theta-prefix
  double estimate = 0;      // n * coverage
  bool passed = false;      // estimate >= (1 + eps') x
};

struct SamplingTrace {
  std::vector<IterationRecord> iterations;
  double lb = 1.0;
  std::size_t theta_tilde = 0;   // ceil(lambda* / lb)
  std::size_t rr_generated = 0;  // sets materialized while sampling
};

// Number of doubling iterations: floor(log2 n) - 1, never negative.
inline int sampling_iterations(NodeId n) {
  return std::max(0, static_cast<int>(std::bit_width(n)) - 2);
}

// The Sampling procedure. Reads prefixes of `seq` of length ceil(lambda'/x_i)
// for x_i = n/2^i until the greedy estimate clears (1+eps') x_i, then sets
// LB = n F / (1+eps'); LB stays 1 if no iteration passes. The stopping time is
// ceil(lambda*/LB).
//
// `seq` is only read through prefixes, so its content is unaffected by where
// the loop stops.
inline SamplingTrace sampling(const Graph& g, const ImmParams& params, RRSequence& seq, unsigned threads = 1) {
  const NodeId n = g.node_count();
  const double nd = static_cast<double>(n);
  const auto k = static_cast<std::size_t>(params.k);
  SamplingTrace trace;
  const int last = sampling_iterations(n);
  for (int i = 1; i <= last; ++i) {
    IterationRecord rec;
    rec.i = i;
    rec.x = nd / std::ldexp(1.0, i);
    rec.theta = static_cast<std::size_t>(std::ceil(params.lambda_prime / rec.x));
    const SeedResult sel = node_selection(seq.prefix(rec.theta, threads), k, n);
    rec.coverage = sel.coverage;
    rec.estimate = nd * sel.coverage;
    rec.passed = rec.estimate >= (1.0 + params.eps_prime) * rec.x;
    trace.iterations.push_back(rec);
    if (rec.passed) {
      trace.lb = rec.estimate / (1.0 + params.eps_prime);
      break;
    }
  }
  trace.theta_tilde = static_cast<std::size_t>(std::ceil(params.lambda_star / trace.lb));
  trace.rr_generated = seq.materialized();
  return trace;
}

struct PhaseTimes {
  double sampling_ms = 0;
  double select_ms = 0;  // final-phase RR generation plus NodeSelection
  double total_ms = 0;
};

struct RunOptions {
  unsigned threads = 1;
  bool keep_sets = false;  // copy the RR sets into the output (tests only)
};

struct ImmOutput {
  Variant variant = Variant::kImm;
  ImmParams params;
  SeedResult selection;
  SamplingTrace trace;
  PhaseTimes times;
  std::uint64_t sampling_seed = 0;
  std::uint64_t final_seed = 0;      // equals sampling_seed except for w1
  std::size_t rr_sets_total = 0;     // for w1, both sequences
  std::vector<RRSet> sampling_sets;  // filled only with keep_sets
  std::vector<RRSet> final_sets;     // filled only with keep_sets
};

// Seed of the fresh sequence W1 feeds to the final NodeSelection.
inline std::uint64_t w1_regen_seed(std::uint64_t master_seed) { return derive_seed(master_seed, "w1-regen"); }

// End-to-end run. imm and w2 select from the first theta~ sets of the very
// sequence the sampling loop read; w1 selects from a second sequence whose
// seed is independent of everything the loop saw, created only after theta~
// is fixed.
inline ImmOutput run(const Graph& g, const ImmParams& params, std::uint64_t master_seed, RunOptions opts = {}) {
  using clock = std::chrono::steady_clock;
  auto ms = [](clock::duration d) { return std::chrono::duration<double, std::milli>(d).count(); };

  ImmOutput out;
  out.variant = params.variant;
  out.params = params;
  out.sampling_seed = master_seed;

  const auto t0 = clock::now();
  RRSequence seq(g, master_seed);
  out.trace = sampling(g, params, seq, opts.threads);
  const auto t1 = clock::now();

  const auto k = static_cast<std::size_t>(params.k);
  const std::size_t theta = out.trace.theta_tilde;
  if (params.variant == Variant::kW1) {
    out.final_seed = w1_regen_seed(master_seed);
    RRSequence fresh(g, out.final_seed);
    auto prefix = fresh.prefix(theta, opts.threads);
    out.selection = node_selection(prefix, k, g.node_count());
    out.rr_sets_total = seq.materialized() + fresh.materialized();
    if (opts.keep_sets) out.final_sets.assign(prefix.begin(), prefix.end());
  } else {
    out.final_seed = master_seed;
    auto prefix = seq.prefix(theta, opts.threads);
    out.selection = node_selection(prefix, k, g.node_count());
    out.rr_sets_total = seq.materialized();
    if (opts.keep_sets) out.final_sets.assign(prefix.begin(), prefix.end());
  }
  const auto t2 = clock::now();

  if (opts.keep_sets) {
    auto all = seq.prefix(seq.materialized());
    out.sampling_sets.assign(all.begin(), all.end());
  }
  out.times = {ms(t1 - t0), ms(t2 - t1), ms(t2 - t0)};
  return out;
}

}  // namespace imm
