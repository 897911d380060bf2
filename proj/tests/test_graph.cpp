#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "imm/graph.hpp"
#include "test_support.hpp"

namespace imm {
namespace {

Graph parse(const std::string& text, Model model) {
  std::istringstream in(text);
  return read_graph(in, model);
}

TEST(LoadGraph, WeightedCascadeSingleEdge) {
  const Graph g = parse("2 1\n0 1\n", Model::kWeightedCascade);
  ASSERT_EQ(g.edge_count(), 1u);
  EXPECT_DOUBLE_EQ(g.edges()[0].p, 1.0);
}

TEST(LoadGraph, WeightedCascadeSplitsByInDegree) {
  const Graph g = parse("5 4\n0 4\n1 4\n2 4\n3 4 0.9\n", Model::kWeightedCascade);
  for (const Arc& a : g.in_arcs(4)) EXPECT_DOUBLE_EQ(a.p, 0.25);  // file p overwritten
}

TEST(LoadGraph, EmptyEdgeSet) {
  const Graph g = parse("5 0\n", Model::kWeightedCascade);
  EXPECT_EQ(g.node_count(), 5u);
  EXPECT_EQ(g.edge_count(), 0u);
  for (NodeId v = 0; v < 5; ++v) {
    EXPECT_TRUE(g.in_arcs(v).empty());
    EXPECT_TRUE(g.out_arcs(v).empty());
  }
}

TEST(LoadGraph, CommentsAndBlankLinesIgnored) {
  const Graph g = parse("# header comment\n3 2\n\n0 1 0.5\n  # inline\n1 2 0.25\n", Model::kExplicit);
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_DOUBLE_EQ(g.edges()[1].p, 0.25);
}

TEST(LoadGraph, MalformedLineReportsLineNumber) {
  try {
    parse("3 2\n0 1\n1 x\n", Model::kWeightedCascade);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(LoadGraph, Errors) {
  EXPECT_THROW(parse("3 1\n0 3\n", Model::kWeightedCascade), BoundsError);
  EXPECT_THROW(parse("3 1\n0 1 1.5\n", Model::kExplicit), DomainError);
  EXPECT_THROW(parse("3 1\n0 1 -0.1\n", Model::kExplicit), DomainError);
  EXPECT_THROW(parse("3 1\n0 1\n", Model::kExplicit), ParseError);   // p required
  EXPECT_THROW(parse("3 2\n0 1\n", Model::kWeightedCascade), ParseError);  // too few lines
  EXPECT_THROW(parse("3 1\n0 1\n1 2\n", Model::kWeightedCascade), ParseError);  // too many
  EXPECT_THROW(parse("3 1\n-1 2\n", Model::kWeightedCascade), ParseError);
  EXPECT_THROW(parse("", Model::kWeightedCascade), ParseError);
  EXPECT_THROW(parse("0 0\n", Model::kWeightedCascade), DomainError);
}

TEST(LoadGraph, SelfLoopsAndParallelEdgesKept) {
  const Graph g = parse("2 3\n0 0\n0 1\n0 1\n", Model::kWeightedCascade);
  EXPECT_EQ(g.self_loop_count(), 1u);
  EXPECT_EQ(g.in_degree(1), 2u);
  EXPECT_DOUBLE_EQ(g.in_arcs(1)[0].p, 0.5);
}

TEST(TransposeIndex, PathGraph) {
  const Graph g(3, {{0, 1, 0.3}, {1, 2, 0.7}});
  const AdjacencyIndex rev = transpose_index(g);
  ASSERT_EQ(rev[2].size(), 1u);
  EXPECT_EQ(rev[2][0].node, 1u);
  EXPECT_DOUBLE_EQ(rev[2][0].p, 0.7);
  EXPECT_TRUE(rev[0].empty());
}

TEST(TransposeIndex, NoEdges) {
  const Graph g(4, {});
  const AdjacencyIndex rev = transpose_index(g);
  for (NodeId v = 0; v < 4; ++v) EXPECT_TRUE(rev[v].empty());
}

TEST(TransposeIndex, RecoversEdgeMultiset) {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 20; ++rep) {
    const Graph g = testing::random_graph(8, 14, rng);
    std::vector<Edge> want(g.edges().begin(), g.edges().end());
    std::sort(want.begin(), want.end());
    EXPECT_EQ(edges_from_reverse(transpose_index(g)), want);
    EXPECT_EQ(edges_from_reverse(g.reverse_index()), want);
  }
}

TEST(GraphProperties, InDegreesSumToM) {
  std::mt19937_64 rng(1);
  const Graph g = testing::random_graph(30, 100, rng);
  std::size_t total = 0;
  for (NodeId v = 0; v < g.node_count(); ++v) total += g.in_degree(v);
  EXPECT_EQ(total, g.edge_count());
}

TEST(GraphProperties, WeightedCascadeInProbabilitiesSumToOne) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<NodeId> node(0, 39);
  std::ostringstream text;
  text << "40 200\n";
  for (int i = 0; i < 200; ++i) text << node(rng) << ' ' << node(rng) << '\n';
  const Graph g = parse(text.str(), Model::kWeightedCascade);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (g.in_degree(v) == 0) continue;
    double sum = 0;
    for (const Arc& a : g.in_arcs(v)) sum += a.p;
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(GraphProperties, WriteLoadRoundTrip) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    const Graph g = testing::random_graph(12, 30, rng);
    std::ostringstream out;
    write_graph(out, g);
    const Graph h = parse(out.str(), Model::kExplicit);
    EXPECT_TRUE(std::equal(g.edges().begin(), g.edges().end(), h.edges().begin(), h.edges().end()));
    EXPECT_EQ(g.fingerprint(), h.fingerprint());
  }
}

}  // namespace
}  // namespace imm
