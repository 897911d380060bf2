#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "imm/error.hpp"
#include "imm/graph.hpp"
#include "imm/harness/stats.hpp"
#include "imm/imm.hpp"
#include "imm/mc.hpp"
#include "imm/oracle.hpp"
#include "imm/params.hpp"

namespace imm::harness {

struct ExperimentConfig {
  std::string graph_path;
  Model model = Model::kWeightedCascade;
  std::vector<Variant> variants{Variant::kImm};
  std::vector<std::size_t> ks{50};
  double eps = 0.1;
  double ell = 1.0;
  std::size_t trials = 1;
  std::uint64_t seed = 1;  // trial t runs with master seed `seed + t`
  std::size_t mc_runs = 10000;
  std::string out_dir = ".";
  unsigned threads = 1;
  bool zero_timings = false;  // write 0 in timing columns (byte-stable CSV)
};

inline std::uint64_t trial_seed(const ExperimentConfig& cfg, std::size_t t) { return cfg.seed + t; }

inline void validate(const ExperimentConfig& cfg, const Graph& g) {
  if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
  if (cfg.variants.empty()) throw ConfigError("at least one variant is required");
  if (cfg.ks.empty()) throw ConfigError("at least one k is required");
  for (std::size_t k : cfg.ks) {
    if (k < 1 || k > g.node_count()) {
      throw ConfigError("k=" + std::to_string(k) + " outside [1, n=" + std::to_string(g.node_count()) + "]");
    }
  }
  if (!(cfg.eps > 0 && cfg.eps < 1)) throw ConfigError("eps must lie in (0,1)");
  if (!(cfg.ell > 0)) throw ConfigError("ell must be > 0");
  if (cfg.mc_runs < 1) throw ConfigError("mc-runs must be >= 1");
  if (g.node_count() < 2) throw ConfigError("graph needs at least 2 nodes");
}

// Whether exact OPT is computable for (g, k) within the oracle budgets.
inline bool oracle_applicable(const Graph& g, std::size_t k) {
  return g.edge_count() <= kOracleMaxEdges && g.node_count() <= kOracleMaxNodes && k <= g.node_count() &&
         std::exp(log_binomial(g.node_count(), static_cast<double>(k))) <= kOracleMaxSubsets;
}

// Approximation target used by the success flag.
inline double success_ratio(double eps) { return 1.0 - 1.0 / std::numbers::e - eps; }

struct TrialRecord {
  Variant variant = Variant::kImm;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::size_t theta_tilde = 0;
  double lb = 0;
  double gamma = 0;
  double lambda_star = 0;
  std::size_t rr_sets_total = 0;
  double spread_mean = 0;
  double spread_stderr = 0;
  std::optional<double> opt_exact;
  std::optional<double> sigma_exact;  // exact sigma of the returned seeds, oracle instances only
  std::optional<bool> success;        // set only when OPT is known exactly
  PhaseTimes times;
  std::vector<NodeId> seeds;
};

// Exact OPT per k plus a memo of exact sigma per seed set, shared by trials.
class OracleCache {
 public:
  explicit OracleCache(const Graph& g) : g_(&g) {}

  std::optional<double> opt(std::size_t k) {
    if (!oracle_applicable(*g_, k)) return std::nullopt;
    std::lock_guard lock(mu_);
    auto it = opt_.find(k);
    if (it == opt_.end()) it = opt_.emplace(k, exact_opt(*g_, k).value).first;
    return it->second;
  }

  double sigma(std::vector<NodeId> seeds) {
    std::sort(seeds.begin(), seeds.end());
    {
      std::lock_guard lock(mu_);
      if (auto it = sigma_.find(seeds); it != sigma_.end()) return it->second;
    }
    const double s = exact_sigma(*g_, seeds);
    std::lock_guard lock(mu_);
    sigma_.emplace(seeds, s);
    return s;
  }

 private:
  const Graph* g_;
  std::mutex mu_;
  std::map<std::size_t, double> opt_;
  std::map<std::vector<NodeId>, double> sigma_;
};

// One (variant, k, seed) cell. The Monte Carlo stream depends only on the
// trial seed, so matched trials of different variants share it.
inline TrialRecord run_trial(const Graph& g, const ExperimentConfig& cfg, Variant variant, std::size_t k,
                             std::uint64_t seed, OracleCache& oracle, unsigned threads = 1) {
  const double n = g.node_count();
  const ImmParams params = make_params(n, static_cast<double>(k), cfg.eps, cfg.ell, variant);
  const ImmOutput out = run(g, params, seed, RunOptions{threads, false});

  TrialRecord rec;
  rec.variant = variant;
  rec.k = k;
  rec.seed = seed;
  rec.theta_tilde = out.trace.theta_tilde;
  rec.lb = out.trace.lb;
  rec.gamma = params.gamma;
  rec.lambda_star = params.lambda_star;
  rec.rr_sets_total = out.rr_sets_total;
  rec.times = out.times;
  rec.seeds = out.selection.seeds;
  const SpreadEstimate est = estimate_spread(g, rec.seeds, cfg.mc_runs, derive_seed(seed, "mc"), threads);
  rec.spread_mean = est.mean;
  rec.spread_stderr = est.std_err;
  if (auto opt = oracle.opt(k)) {
    rec.opt_exact = *opt;
    rec.sigma_exact = oracle.sigma(rec.seeds);
    rec.success = *rec.sigma_exact >= success_ratio(cfg.eps) * *opt;
  }
  return rec;
}

// Calls fn(i) for i in [0, count) on `threads` workers.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) fn(i);
    });
  }
}

// Runs every (variant, k, trial) cell. Records come back in
// (variant, k, seed) order whatever the completion order.
inline std::vector<TrialRecord> maximize(const Graph& g, const ExperimentConfig& cfg) {
  validate(cfg, g);
  OracleCache oracle(g);
  for (std::size_t k : cfg.ks) oracle.opt(k);  // fill before the pool starts

  struct Cell {
    Variant variant;
    std::size_t k;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (Variant v : cfg.variants) {
    for (std::size_t k : cfg.ks) {
      for (std::size_t t = 0; t < cfg.trials; ++t) cells.push_back({v, k, trial_seed(cfg, t)});
    }
  }
  std::vector<TrialRecord> records(cells.size());
  parallel_for(cells.size(), cfg.threads, [&](std::size_t i) {
    records[i] = run_trial(g, cfg, cells[i].variant, cells[i].k, cells[i].seed, oracle);
  });
  return records;
}

inline constexpr const char* kCsvHeader =
    "variant,k,seed,theta_tilde,LB,gamma,rr_sets_total,spread_mean,spread_stderr,opt_exact,success,"
    "time_sampling_ms,time_select_ms,time_total_ms";

inline void write_csv(std::ostream& out, const std::vector<TrialRecord>& records, bool zero_timings = false) {
  out << kCsvHeader << '\n';
  for (const TrialRecord& r : records) {
    std::ostringstream line;
    line << std::fixed;
    line << to_string(r.variant) << ',' << r.k << ',' << r.seed << ',' << r.theta_tilde << ','
         << std::setprecision(6) << r.lb << ',' << std::setprecision(3) << r.gamma << ',' << r.rr_sets_total << ','
         << std::setprecision(6) << r.spread_mean << ',' << r.spread_stderr << ',';
    if (r.opt_exact) line << *r.opt_exact;
    line << ',';
    if (r.success) line << (*r.success ? 1 : 0);
    line << ',' << std::setprecision(3);
    if (zero_timings) {
      line << 0.0 << ',' << 0.0 << ',' << 0.0;
    } else {
      line << r.times.sampling_ms << ',' << r.times.select_ms << ',' << r.times.total_ms;
    }
    out << line.str() << '\n';
  }
}

// ---------------------------------------------------------------------------
// Guarantee verification on oracle-sized graphs.

struct GuaranteeReport {
  Variant variant = Variant::kImm;
  std::size_t k = 0;
  std::size_t trials = 0;
  std::size_t failures = 0;          // sigma(S) < (1 - 1/e - eps) OPT
  std::size_t theta_short = 0;       // theta~ < lambda*/OPT
  double opt = 0;
  double lambda_star = 0;
  double ell_eff = 0;
  double failure_rate = 0;
  stats::Interval failure_ci;        // Wilson 95%
  double target = 0;                 // 2 / n^ell
  double threshold = 0;              // max(target, statistical floor)
  bool pass = false;                 // failure_ci.hi <= threshold
  std::vector<TrialRecord> records;
};

inline constexpr double kStatisticalFloor = 0.05;

inline GuaranteeReport verify_guarantee(const Graph& g, const ExperimentConfig& cfg, Variant variant,
                                        std::size_t k) {
  ExperimentConfig checked = cfg;
  checked.ks = {k};
  validate(checked, g);
  if (!oracle_applicable(g, k)) {
    throw OracleRefusal("verify-guarantee needs an oracle-sized graph (m <= 20, n <= 64, C(n,k) <= 1e6)");
  }
  OracleCache oracle(g);
  GuaranteeReport rep;
  rep.variant = variant;
  rep.k = k;
  rep.trials = cfg.trials;
  rep.opt = *oracle.opt(k);
  const ImmParams params = make_params(g.node_count(), static_cast<double>(k), cfg.eps, cfg.ell, variant);
  rep.lambda_star = params.lambda_star;
  rep.ell_eff = params.ell_eff;

  rep.records.resize(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
    rep.records[t] = run_trial(g, cfg, variant, k, trial_seed(cfg, t), oracle);
  });
  for (const TrialRecord& r : rep.records) {
    rep.failures += !*r.success;
    rep.theta_short += static_cast<double>(r.theta_tilde) < rep.lambda_star / rep.opt;
  }
  rep.failure_rate = static_cast<double>(rep.failures) / static_cast<double>(rep.trials);
  rep.failure_ci = stats::wilson(rep.failures, rep.trials);
  rep.target = 2.0 / std::pow(static_cast<double>(g.node_count()), cfg.ell);
  rep.threshold = std::max(rep.target, kStatisticalFloor);
  rep.pass = rep.failure_ci.hi <= rep.threshold;
  return rep;
}

inline void print_report(std::ostream& out, const GuaranteeReport& r) {
  out << std::fixed << std::setprecision(4);
  out << "variant=" << to_string(r.variant) << " k=" << r.k << " trials=" << r.trials << " OPT=" << r.opt
      << " lambda*=" << std::setprecision(1) << r.lambda_star << std::setprecision(4) << " ell_eff=" << r.ell_eff
      << '\n';
  out << "  failures=" << r.failures << " rate=" << r.failure_rate << " wilson95=[" << r.failure_ci.lo << ", "
      << r.failure_ci.hi << "]\n";
  out << "  target 2/n^ell=" << r.target << " threshold=" << r.threshold << " theta_short=" << r.theta_short
      << " -> " << (r.pass ? "PASS" : "FAIL") << '\n';
}

// ---------------------------------------------------------------------------
// Stopping-time bias probe.

struct BiasRow {
  int i = 0;
  std::size_t theta = 0;
  stats::Summary unconditioned;  // n F on R_0[theta_i], all sequences
  stats::Summary conditioned;    // same, only sequences that reach iteration i
  std::optional<double> welch_t;
  bool low_count = false;
};

struct BiasReport {
  std::size_t sequences = 0;
  std::vector<BiasRow> rows;
};

inline constexpr std::size_t kBiasMinSamples = 30;

// For each loop iteration i, the greedy estimate n F on the theta_i-prefix is
// recorded for every sequence, and separately for those sequences on which
// the algorithm actually gets to iteration i (all earlier checks failed).
inline BiasReport bias_probe(const Graph& g, std::size_t k, double eps, double ell, std::size_t sequences,
                             std::uint64_t seed, unsigned threads = 1) {
  const NodeId n = g.node_count();
  const ImmParams params = make_params(n, static_cast<double>(k), eps, ell, Variant::kImm);
  const int last = sampling_iterations(n);

  // est[s][i-1], reached[s][i-1]
  std::vector<std::vector<double>> est(sequences, std::vector<double>(last));
  std::vector<std::vector<char>> reached(sequences, std::vector<char>(last));
  parallel_for(sequences, threads, [&](std::size_t s) {
    RRSequence seq(g, seed + s);
    bool alive = true;
    for (int i = 1; i <= last; ++i) {
      const double x = static_cast<double>(n) / std::ldexp(1.0, i);
      const auto theta = static_cast<std::size_t>(std::ceil(params.lambda_prime / x));
      const double e = static_cast<double>(n) * node_selection(seq.prefix(theta), k, n).coverage;
      est[s][i - 1] = e;
      reached[s][i - 1] = alive;
      if (e >= (1.0 + params.eps_prime) * x) alive = false;
    }
  });

  BiasReport rep;
  rep.sequences = sequences;
  for (int i = 1; i <= last; ++i) {
    std::vector<double> all, cond;
    for (std::size_t s = 0; s < sequences; ++s) {
      all.push_back(est[s][i - 1]);
      if (reached[s][i - 1]) cond.push_back(est[s][i - 1]);
    }
    BiasRow row;
    row.i = i;
    row.theta = static_cast<std::size_t>(std::ceil(params.lambda_prime / (static_cast<double>(n) / std::ldexp(1.0, i))));
    row.unconditioned = stats::summarize(all);
    row.conditioned = stats::summarize(cond);
    row.welch_t = stats::welch_t(row.conditioned, row.unconditioned);
    row.low_count = row.conditioned.count < kBiasMinSamples;
    rep.rows.push_back(row);
  }
  return rep;
}

inline void print_report(std::ostream& out, const BiasReport& r) {
  out << "sequences=" << r.sequences << '\n';
  out << "i,theta,uncond_n,uncond_mean,uncond_sd,cond_n,cond_mean,cond_sd,welch_t,low_count\n";
  out << std::fixed << std::setprecision(4);
  for (const BiasRow& row : r.rows) {
    out << row.i << ',' << row.theta << ',' << row.unconditioned.count << ',' << row.unconditioned.mean << ','
        << row.unconditioned.sd << ',' << row.conditioned.count << ',';
    if (row.conditioned.count > 0) {
      out << row.conditioned.mean << ',' << row.conditioned.sd;
    } else {
      out << "n/a,n/a";
    }
    out << ',';
    if (row.welch_t) {
      out << *row.welch_t;
    } else {
      out << "n/a";
    }
    out << ',' << (row.low_count ? "LOW" : "ok") << '\n';
  }
}

// ---------------------------------------------------------------------------

struct GammaAudit {
  GammaResult result;
  bool holds = false;  // ceil(lambda*(l+gamma)) <= n^gamma
};

inline GammaAudit gamma_audit(double n, double k, double eps, double ell) {
  GammaAudit a;
  a.result = gamma_search(n, k, eps, ell);
  a.holds = a.result.lambda_star_ceil <= a.result.n_pow_gamma;
  return a;
}

inline void print_audit(std::ostream& out, double n, double k, double eps, double ell, const GammaAudit& a) {
  out << std::setprecision(3) << std::fixed << "n=" << std::setprecision(0) << n << " k=" << k
      << std::setprecision(4) << " eps=" << eps << " ell=" << ell << '\n'
      << std::setprecision(3) << "gamma=" << a.result.gamma << '\n'
      << std::setprecision(0) << "ceil(lambda*(ell+gamma))=" << a.result.lambda_star_ceil << '\n'
      << std::setprecision(1) << "n^gamma=" << a.result.n_pow_gamma << '\n'
      << "audit: " << (a.holds ? "holds" : "VIOLATED") << '\n';
}

}  // namespace imm::harness
