#include <gtest/gtest.h>

#include <cmath>

#include "doppel/baselines.hpp"
#include "support.hpp"

using namespace doppel;
using namespace doppel::testing;

TEST(ErGraph, Extremes) {
  EXPECT_EQ(er_graph(30, 0.0, 1).edge_count(), 0u);
  EXPECT_EQ(er_graph(30, 1.0, 1), complete_graph(30));
  EXPECT_EQ(er_graph(0, 0.5, 1).node_count(), 0u);
  EXPECT_THROW(er_graph(5, 1.5, 1), ContractViolation);
}

TEST(ErGraph, EdgeCountWithinThreeSd) {
  const std::size_t n = 200;
  const double p = 0.05;
  const double pairs = n * (n - 1) / 2.0;
  double total = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) total += static_cast<double>(er_graph(n, p, s).edge_count());
  const double mean = total / 100.0;
  const double sd_of_mean = std::sqrt(pairs * p * (1 - p) / 100.0);
  EXPECT_NEAR(mean, pairs * p, 3 * sd_of_mean);
}

TEST(ErGraph, ReproducibleAndSeedSensitive) {
  EXPECT_EQ(er_graph(50, 0.1, 7), er_graph(50, 0.1, 7));
  EXPECT_NE(er_graph(50, 0.1, 7), er_graph(50, 0.1, 8));
}

TEST(BaGraph, SmallestCaseIsComplete) {
  for (int m = 1; m <= 5; ++m) {
    const Graph g = ba_graph(static_cast<std::size_t>(m + 1), m, 3);
    EXPECT_EQ(g.edge_count(), static_cast<std::size_t>(m));
    // The first arrival joins every seed node: a star on m leaves.
    EXPECT_EQ(g.degree(static_cast<NodeId>(m)), static_cast<std::size_t>(m));
  }
  EXPECT_EQ(ba_graph(3, 2, 1), make_graph(3, {{0, 2}, {1, 2}}));
}

TEST(BaGraph, EdgeCountAndMinimumDegree) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const std::size_t n = 300;
    const int m = 3;
    const Graph g = ba_graph(n, m, s);
    EXPECT_EQ(g.edge_count(), static_cast<std::size_t>(m) * (n - static_cast<std::size_t>(m)));
    for (std::size_t v = static_cast<std::size_t>(m); v < n; ++v) {
      EXPECT_GE(g.degree(static_cast<NodeId>(v)), static_cast<std::size_t>(m));
    }
  }
  EXPECT_EQ(ba_graph(100, 2, 5), ba_graph(100, 2, 5));
  EXPECT_THROW(ba_graph(3, 3, 1), ContractViolation);
  EXPECT_THROW(ba_graph(10, 0, 1), ContractViolation);
}

TEST(ChungLu, ZeroDegreesGiveEmptyGraph) {
  const std::vector<int> zeros(10, 0);
  const Graph g = chung_lu(zeros, 1);
  EXPECT_EQ(g.node_count(), 10u);
  EXPECT_EQ(g.edge_count(), 0u);
}

TEST(ChungLu, ExpectedDegreesWithinThreeSd) {
  // min(d_i d_j / Σd, 1) stays below 1 for this sequence, so E[deg i] is
  // Σ_{j≠i} d_i d_j / Σd.
  std::vector<int> d;
  for (int i = 0; i < 40; ++i) d.push_back(1 + i % 8);
  double sum = 0.0;
  for (int x : d) sum += x;
  std::vector<double> expected(d.size()), variance(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (i == j) continue;
      const double p = std::min(d[i] * d[j] / sum, 1.0);
      expected[i] += p;
      variance[i] += p * (1 - p);
    }
  }
  constexpr int kTrials = 1000;
  std::vector<double> mean(d.size(), 0.0);
  for (int t = 0; t < kTrials; ++t) {
    const Graph g = chung_lu(d, static_cast<std::uint64_t>(t));
    for (std::size_t i = 0; i < d.size(); ++i) mean[i] += static_cast<double>(g.degree(static_cast<NodeId>(i))) / kTrials;
  }
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_NEAR(mean[i], expected[i], 3 * std::sqrt(variance[i] / kTrials)) << "node " << i;
  }
}

TEST(ChungLu, SequenceOverloadAgrees) {
  const std::vector<int> d{3, 2, 2, 1};
  EXPECT_EQ(chung_lu(DegreeSequence(d), 4), chung_lu(d, 4));
}

TEST(ConfModel, FullOverlapReturnsOriginal) {
  Rng rng(1);
  const Graph g0 = random_graph(30, 0.2, rng);
  const auto r = conf_model(g0, 1.0, 10, 2);
  ASSERT_TRUE(r.graph.has_value());
  EXPECT_EQ(*r.graph, g0);
  EXPECT_EQ(r.kept_edges, g0.edge_count());
}

TEST(ConfModel, PreservesDegreesAndKeepsOverlap) {
  Rng rng(2);
  for (int t = 0; t < 10; ++t) {
    // Whole-pairing rejection needs a sparse remainder to succeed at all.
    const Graph g0 = random_graph(60, 0.05, rng);
    for (double overlap : {0.75, 0.9}) {
      const auto r = conf_model(g0, overlap, 5000, static_cast<std::uint64_t>(t));
      ASSERT_TRUE(r.graph.has_value()) << "attempts " << r.attempts;
      EXPECT_EQ(r.graph->degrees(), g0.degrees());
      EXPECT_GE(edge_overlap(*r.graph, g0, NodeCorrespondence::identity(60)), overlap - 1e-12);
      EXPECT_EQ(r.kept_edges, static_cast<std::size_t>(std::ceil(overlap * static_cast<double>(g0.edge_count()) - 1e-9)));
    }
  }
}

TEST(ConfModel, RewiringOfCompleteGraphsIsForced) {
  // The only simple pairing of K4's stubs is K4 itself.
  const auto k4 = conf_model(complete_graph(4), 0.0, 1000, 1);
  ASSERT_TRUE(k4.graph.has_value());
  EXPECT_EQ(*k4.graph, complete_graph(4));
  EXPECT_GE(k4.attempts, 1);
  EXPECT_EQ(k4.kept_edges, 0u);
}

TEST(ConfModel, RejectsBadArguments) {
  EXPECT_THROW(conf_model(complete_graph(4), 1.5, 10, 1), ContractViolation);
  EXPECT_THROW(conf_model(complete_graph(4), 0.5, 0, 1), ContractViolation);
}
