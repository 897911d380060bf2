#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "imm/imm.hpp"
#include "imm/oracle.hpp"
#include "test_support.hpp"

namespace imm {
namespace {

TEST(Sampling, SingleNodeLoopNeverRuns) {
  const Graph g(1, {});
  ImmParams p;
  p.n = 1;
  p.k = 1;
  p.eps = 0.1;
  p.eps_prime = eps_prime(0.1);
  p.lambda_star = 123.4;
  RRSequence seq(g, 1);
  const SamplingTrace t = sampling(g, p, seq);
  EXPECT_TRUE(t.iterations.empty());
  EXPECT_EQ(t.lb, 1.0);
  EXPECT_EQ(t.theta_tilde, 124u);
  EXPECT_EQ(t.rr_generated, 0u);
}

TEST(Sampling, IterationCount) {
  EXPECT_EQ(sampling_iterations(1), 0);
  EXPECT_EQ(sampling_iterations(3), 0);
  EXPECT_EQ(sampling_iterations(4), 1);
  EXPECT_EQ(sampling_iterations(16), 3);
  EXPECT_EQ(sampling_iterations(17), 3);
  EXPECT_EQ(sampling_iterations(15233), 12);
}

TEST(Sampling, TraceFollowsDoublingSchedule) {
  std::mt19937_64 rng(1);
  const Graph g = testing::random_graph(40, 80, rng, 0.05, 0.3);
  const ImmParams p = make_params(40, 3, 0.3, 1, Variant::kImm);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RRSequence seq(g, seed);
    const SamplingTrace t = sampling(g, p, seq);
    ASSERT_FALSE(t.iterations.empty());
    for (const IterationRecord& rec : t.iterations) {
      EXPECT_DOUBLE_EQ(rec.x, 40.0 / std::pow(2.0, rec.i));
      EXPECT_EQ(rec.theta, static_cast<std::size_t>(std::ceil(p.lambda_prime / rec.x)));
      EXPECT_EQ(rec.passed, rec.estimate >= (1 + p.eps_prime) * rec.x);
    }
    for (std::size_t j = 0; j + 1 < t.iterations.size(); ++j) EXPECT_FALSE(t.iterations[j].passed);
    if (t.iterations.back().passed) {
      EXPECT_DOUBLE_EQ(t.lb, t.iterations.back().estimate / (1 + p.eps_prime));
    } else {
      EXPECT_EQ(t.iterations.size(), static_cast<std::size_t>(sampling_iterations(40)));
      EXPECT_EQ(t.lb, 1.0);
    }
    EXPECT_GE(t.lb, 1.0);
    EXPECT_EQ(t.theta_tilde, static_cast<std::size_t>(std::ceil(p.lambda_star / t.lb)));
    EXPECT_LE(t.theta_tilde, static_cast<std::size_t>(std::ceil(p.lambda_star)));
  }
}

TEST(Run, ImmFinalPrefixComesFromSamplingSequence) {
  std::mt19937_64 rng(2);
  const Graph g = testing::random_graph(12, 20, rng, 0.1, 0.5);
  const ImmParams p = make_params(12, 2, 0.4, 1, Variant::kImm);
  const ImmOutput out = run(g, p, 31, RunOptions{1, true});
  ASSERT_EQ(out.final_sets.size(), out.trace.theta_tilde);
  ASSERT_GE(out.sampling_sets.size(), out.final_sets.size());
  EXPECT_TRUE(std::equal(out.final_sets.begin(), out.final_sets.end(), out.sampling_sets.begin()));
  EXPECT_EQ(out.final_seed, out.sampling_seed);
  EXPECT_EQ(out.rr_sets_total, out.sampling_sets.size());
}

TEST(Run, W1RegeneratesFromIndependentSequence) {
  std::mt19937_64 rng(3);
  const Graph g = testing::random_graph(12, 20, rng, 0.1, 0.5);
  const ImmParams pi = make_params(12, 2, 0.4, 1, Variant::kImm);
  const ImmParams pw = make_params(12, 2, 0.4, 1, Variant::kW1);
  const ImmOutput a = run(g, pi, 31, RunOptions{1, true});
  const ImmOutput b = run(g, pw, 31, RunOptions{1, true});

  // same sampling phase
  ASSERT_EQ(a.trace.iterations.size(), b.trace.iterations.size());
  for (std::size_t i = 0; i < a.trace.iterations.size(); ++i) {
    EXPECT_EQ(a.trace.iterations[i].theta, b.trace.iterations[i].theta);
    EXPECT_EQ(a.trace.iterations[i].coverage, b.trace.iterations[i].coverage);
  }
  EXPECT_EQ(a.trace.lb, b.trace.lb);
  EXPECT_EQ(a.trace.theta_tilde, b.trace.theta_tilde);

  // different final sequence
  EXPECT_NE(b.final_seed, b.sampling_seed);
  EXPECT_EQ(b.final_seed, w1_regen_seed(31));
  EXPECT_FALSE(std::equal(b.final_sets.begin(), b.final_sets.end(), a.final_sets.begin()));
  RRSequence fresh(g, b.final_seed);
  const auto want = fresh.prefix(b.trace.theta_tilde);
  EXPECT_TRUE(std::equal(want.begin(), want.end(), b.final_sets.begin(), b.final_sets.end()));

  EXPECT_EQ(b.rr_sets_total, b.trace.rr_generated + b.trace.theta_tilde);
  EXPECT_LE(b.rr_sets_total, 2 * static_cast<std::size_t>(std::ceil(pw.lambda_star)));
}

TEST(Run, W2UsesInflatedConstants) {
  std::mt19937_64 rng(4);
  const Graph g = testing::random_graph(16, 20, rng, 0.1, 0.5);
  const ImmParams pi = make_params(16, 2, 0.3, 1, Variant::kImm);
  const ImmParams p2 = make_params(16, 2, 0.3, 1, Variant::kW2);
  EXPECT_GT(p2.lambda_star, pi.lambda_star);
  const ImmOutput out = run(g, p2, 5, RunOptions{1, true});
  EXPECT_EQ(out.variant, Variant::kW2);
  EXPECT_TRUE(std::equal(out.final_sets.begin(), out.final_sets.end(), out.sampling_sets.begin()));
  EXPECT_LE(out.trace.theta_tilde, static_cast<std::size_t>(std::ceil(p2.lambda_star)));
}

TEST(Run, ThreadCountDoesNotChangeResult) {
  std::mt19937_64 rng(5);
  const Graph g = testing::random_graph(60, 200, rng, 0.02, 0.2);
  const ImmParams p = make_params(60, 4, 0.3, 1, Variant::kW1);
  const ImmOutput a = run(g, p, 9, RunOptions{1, false});
  const ImmOutput b = run(g, p, 9, RunOptions{4, false});
  EXPECT_EQ(a.selection.seeds, b.selection.seeds);
  EXPECT_EQ(a.trace.theta_tilde, b.trace.theta_tilde);
  EXPECT_EQ(a.selection.covered, b.selection.covered);
}

TEST(Run, StoppingTimeUsuallyCoversOptRatio) {
  // Light version of the acceptance check: theta~ >= lambda*/OPT in most runs.
  std::mt19937_64 rng(6);
  const Graph g = testing::random_graph(8, 12, rng, 0.2, 0.6);
  const double opt = exact_opt(g, 2).value;
  const ImmParams p = make_params(8, 2, 0.4, 1, Variant::kImm);
  int ok = 0;
  for (std::uint64_t s = 0; s < 40; ++s) {
    const ImmOutput out = run(g, p, s);
    ok += static_cast<double>(out.trace.theta_tilde) >= p.lambda_star / opt;
  }
  EXPECT_GE(ok, 36);
}

}  // namespace
}  // namespace imm
