#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "imm/oracle.hpp"
#include "imm/select.hpp"
#include "test_support.hpp"

namespace imm {
namespace {

constexpr double kGreedyRatio = 1.0 - 1.0 / std::numbers::e;

TEST(NodeSelection, SinglePick) {
  const auto sets = testing::sets_of({{0}, {0, 1}, {2}});
  const SeedResult r = node_selection(sets, 1, 3);
  EXPECT_EQ(r.seeds, (std::vector<NodeId>{0}));
  EXPECT_DOUBLE_EQ(r.coverage, 2.0 / 3.0);
  // brute force over all 1-subsets
  const MaxCoverage best = exact_max_coverage(sets, 1, 3);
  EXPECT_EQ(best.covered, 2u);
}

TEST(NodeSelection, SaturatedCoverageTieBreaksLowestId) {
  const auto sets = testing::sets_of({{3}, {3}, {3}});
  const SeedResult r = node_selection(sets, 2, 5);
  EXPECT_EQ(r.seeds, (std::vector<NodeId>{3, 0}));
  EXPECT_DOUBLE_EQ(r.coverage, 1.0);
  EXPECT_EQ(r.marginal_counts, (std::vector<std::size_t>{3, 0}));
}

TEST(NodeSelection, ClampsKToN) {
  const auto sets = testing::sets_of({{0}, {1}});
  const SeedResult r = node_selection(sets, 5, 3);
  EXPECT_TRUE(r.clamped);
  EXPECT_FALSE(r.warning.empty());
  EXPECT_EQ(r.seeds.size(), 3u);
}

TEST(NodeSelection, Errors) {
  const auto sets = testing::sets_of({{0}});
  EXPECT_THROW(node_selection(sets, 0, 2), DomainError);
  EXPECT_THROW(node_selection({}, 1, 2), DomainError);
}

TEST(NodeSelection, SixNodeInstanceAgainstExhaustive) {
  std::mt19937_64 rng(600);
  const auto sets = testing::random_sets(6, 12, rng, 0.25);
  const SeedResult r = node_selection(sets, 2, 6);
  const MaxCoverage best = exact_max_coverage(sets, 2, 6);
  EXPECT_GE(r.coverage, kGreedyRatio * best.coverage);
}

TEST(NodeSelection, ResultInvariants) {
  std::mt19937_64 rng(601);
  for (int rep = 0; rep < 300; ++rep) {
    const NodeId n = 3 + static_cast<NodeId>(rng() % 15);
    const std::size_t k = 1 + rng() % 6;
    const auto sets = testing::random_sets(n, 1 + rng() % 40, rng, 0.15);
    const SeedResult r = node_selection(sets, k, n);
    ASSERT_EQ(r.seeds.size(), std::min<std::size_t>(k, n));
    auto sorted = r.seeds;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(std::adjacent_find(sorted.begin(), sorted.end()), sorted.end());
    EXPECT_TRUE(std::is_sorted(r.marginal_counts.rbegin(), r.marginal_counts.rend()));
    std::size_t sum = 0;
    for (auto c : r.marginal_counts) sum += c;
    EXPECT_EQ(sum, r.covered);
    double fsum = 0;
    for (double g : r.marginal_gains) fsum += g;
    EXPECT_NEAR(fsum, r.coverage, 1e-12);
    EXPECT_DOUBLE_EQ(coverage_fraction(sets, r.seeds, n), r.coverage);
  }
}

TEST(NodeSelection, LazyMatchesNaive) {
  std::mt19937_64 rng(602);
  for (int rep = 0; rep < 1000; ++rep) {
    const NodeId n = 2 + static_cast<NodeId>(rng() % 30);
    const std::size_t k = 1 + rng() % 8;
    // Low density and small theta produce many ties.
    const auto sets = testing::random_sets(n, 1 + rng() % 50, rng, (rng() % 4) * 0.1);
    const SeedResult lazy = node_selection(sets, k, n);
    const SeedResult naive = naive_node_selection(sets, k, n);
    ASSERT_EQ(lazy.seeds, naive.seeds) << "rep " << rep;
    ASSERT_EQ(lazy.marginal_counts, naive.marginal_counts);
  }
}

TEST(NodeSelection, Deterministic) {
  std::mt19937_64 rng(603);
  const auto sets = testing::random_sets(20, 100, rng, 0.1);
  const SeedResult a = node_selection(sets, 5, 20), b = node_selection(sets, 5, 20);
  EXPECT_EQ(a.seeds, b.seeds);
  EXPECT_EQ(a.marginal_counts, b.marginal_counts);
}

TEST(NodeSelection, GreedyRatioProperty) {
  std::mt19937_64 rng(604);
  int violations = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const NodeId n = 2 + static_cast<NodeId>(rng() % 11);
    const std::size_t k = 1 + rng() % std::min<std::size_t>(3, n);
    const auto sets = testing::random_sets(n, 1 + rng() % 30, rng, 0.05 + (rng() % 5) * 0.05);
    const SeedResult g = node_selection(sets, k, n);
    const MaxCoverage best = exact_max_coverage(sets, k, n);
    violations += g.coverage < kGreedyRatio * best.coverage;
  }
  EXPECT_EQ(violations, 0);
}

}  // namespace
}  // namespace imm
