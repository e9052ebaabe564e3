#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "doppel/embedding.hpp"
#include "support.hpp"

using namespace doppel;
using namespace doppel::testing;

namespace {

std::vector<TrainingPair> balanced_pairs(const Graph& g, Rng& rng) {
  std::vector<TrainingPair> pairs;
  for (const Edge& e : g.edges()) pairs.push_back({e.u, e.v, 1.0});
  NegativeSampler sampler(g, rng);
  auto neg = sampler.draw(g.edge_count());
  pairs.insert(pairs.end(), neg.begin(), neg.end());
  return pairs;
}

// Central differences over every entry of every parameter.
void check_gradient(const Graph& g, std::optional<Matrix> features, std::uint64_t seed) {
  Rng rng(seed);
  const EncoderInput input(g, std::move(features));
  LinkModel model = LinkModel::initialize(input, 4, 8, 4, 0.01, rng);
  // Nonzero biases so every term of the backward pass is exercised.
  for (auto& p : model.params()) {
    if (p.name.find("bias") != std::string::npos || p.name.find(".b") != std::string::npos) {
      for (Eigen::Index i = 0; i < p.value->size(); ++i) p.value->data()[i] = 0.1 * rng.normal();
    }
  }
  const auto pairs = balanced_pairs(g, rng);
  LinkModel grad = LinkModel::zeros_like(model);
  link_loss(model, input, pairs, &grad);

  auto params = model.params();
  auto grads = grad.params();
  ASSERT_EQ(params.size(), grads.size());
  constexpr double h = 1e-6;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Matrix& w = *params[k].value;
    Matrix numeric(w.rows(), w.cols());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      const double saved = w.data()[i];
      w.data()[i] = saved + h;
      const double up = link_loss(model, input, pairs);
      w.data()[i] = saved - h;
      const double down = link_loss(model, input, pairs);
      w.data()[i] = saved;
      numeric.data()[i] = (up - down) / (2 * h);
    }
    const Matrix& analytic = *grads[k].value;
    const double scale = std::max(analytic.norm() + numeric.norm(), 1e-8);
    EXPECT_LE((analytic - numeric).norm() / scale, 1e-4) << params[k].name;
  }
}

Graph two_bridged_cliques(std::size_t size) {
  std::vector<Edge> e;
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t u = 0; u < size; ++u)
      for (std::size_t v = u + 1; v < size; ++v)
        e.push_back({static_cast<NodeId>(c * size + u), static_cast<NodeId>(c * size + v)});
  e.push_back({0, static_cast<NodeId>(size)});
  return Graph::from_edges(2 * size, e);
}

EmbeddingConfig small_config(std::uint64_t seed) {
  EmbeddingConfig cfg;
  cfg.hidden_width = 16;
  cfg.embedding_dim = 8;
  cfg.predictor_hidden = 8;
  cfg.adam.learning_rate = 1e-2;
  cfg.schedule = {1, 1, 200, 50, 10};
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST(PredictLink, Examples) {
  const LinkPredictor zero = LinkPredictor::zeros(5, 3);
  Rng rng(1);
  const RowVector a = RowVector::Random(5);
  const RowVector b = RowVector::Random(5);
  EXPECT_EQ(predict_link(zero, a, b), 0.5);

  LinkPredictor unit = LinkPredictor::zeros(3, 1);
  unit.w1(0, 0) = 1.0;
  unit.w2(0, 0) = 1.0;
  const RowVector e1 = RowVector::Unit(3, 0);
  EXPECT_NEAR(predict_link(unit, e1, e1), 1.0 / (1.0 + std::exp(-1.0)), 1e-15);
  EXPECT_NEAR(predict_link(unit, e1, e1), 0.7311, 5e-5);
  // Negative pre-activation passes through the leak.
  EXPECT_NEAR(predict_link(unit, e1, -e1), 1.0 / (1.0 + std::exp(0.01)), 1e-15);

  EXPECT_THROW(predict_link(zero, RowVector::Zero(4), b), ContractViolation);
  EXPECT_THROW(predict_link(zero, a, RowVector::Zero(6)), ContractViolation);
}

TEST(PredictLink, SymmetricAndInUnitInterval) {
  Rng rng(2);
  const LinkPredictor p = LinkPredictor::glorot(6, 4, rng);
  for (int t = 0; t < 100; ++t) {
    RowVector a(6), b(6);
    for (int i = 0; i < 6; ++i) {
      a(i) = 3 * rng.normal();
      b(i) = 3 * rng.normal();
    }
    const double ab = predict_link(p, a, b);
    EXPECT_EQ(ab, predict_link(p, b, a));
    EXPECT_GT(ab, 0.0);
    EXPECT_LT(ab, 1.0);
  }
}

TEST(Sigmoid, StableAtExtremes) {
  EXPECT_EQ(sigmoid(0.0), 0.5);
  EXPECT_EQ(sigmoid(-1000.0), 0.0);
  EXPECT_EQ(sigmoid(1000.0), 1.0);
  EXPECT_NEAR(sigmoid(2.0) + sigmoid(-2.0), 1.0, 1e-15);
}

TEST(LinkLoss, GradientMatchesFiniteDifferencesIdentityFeatures) {
  Rng rng(3);
  const Graph g = planted_partition(6, 0.6, 0.1, 5);
  ASSERT_EQ(g.node_count(), 12u);
  check_gradient(g, std::nullopt, 17);
}

TEST(LinkLoss, GradientMatchesFiniteDifferencesDenseFeatures) {
  const Graph g = planted_partition(6, 0.6, 0.1, 6);
  Rng rng(4);
  Matrix x(12, 5);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  check_gradient(g, x, 18);
}

TEST(LinkLoss, ZeroModelGivesLogTwo) {
  const Graph g = cycle_graph(6);
  const EncoderInput input(g);
  Rng rng(5);
  LinkModel m = LinkModel::zeros_like(LinkModel::initialize(input, 4, 4, 4, 0.01, rng));
  const auto pairs = balanced_pairs(g, rng);
  EXPECT_NEAR(link_loss(m, input, pairs), std::log(2.0), 1e-15);
}

TEST(EncoderInput, MeanAggregatorRows) {
  const Graph g = make_graph(4, {{0, 1}, {0, 2}});
  const EncoderInput input(g);
  const Matrix a = Matrix(input.mean_aggregator());
  EXPECT_DOUBLE_EQ(a(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(a(0, 2), 0.5);
  EXPECT_DOUBLE_EQ(a(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(a.row(3).sum(), 0.0);
  EXPECT_TRUE(input.identity_features());
  EXPECT_EQ(input.feature_dim(), 4);
}

TEST(NegativeSampler, NeverRepeatsAndAvoidsEdges) {
  Rng rng(6);
  const Graph g = random_graph(30, 0.2, rng);
  NegativeSampler sampler(g, rng);
  std::set<std::pair<NodeId, NodeId>> seen;
  const std::size_t non_edges = 30 * 29 / 2 - g.edge_count();
  std::size_t total = 0;
  for (std::size_t batch : {50, 100, 1000}) {
    for (const auto& p : sampler.draw(batch)) {
      EXPECT_LT(p.u, p.v);
      EXPECT_FALSE(g.has_edge(p.u, p.v));
      EXPECT_EQ(p.label, 0.0);
      EXPECT_TRUE(seen.insert({p.u, p.v}).second);
      ++total;
    }
  }
  EXPECT_EQ(total, non_edges);
  EXPECT_EQ(sampler.used(), non_edges);
  EXPECT_TRUE(sampler.draw(5).empty());
}

TEST(CyclingSchedule, Validation) {
  EXPECT_NO_THROW(CyclingSchedule{}.validate());
  EXPECT_THROW((CyclingSchedule{0, 1, 1, 1, 1}).validate(), ContractViolation);
  EXPECT_THROW((CyclingSchedule{1, 1, 1, 1, -1}).validate(), ContractViolation);
}

TEST(TrainEmbedding, TrainingSetGrowsByKPerRound) {
  const Graph g = planted_partition(15, 0.4, 0.05, 7);
  EmbeddingConfig cfg = small_config(8);
  cfg.schedule = {2, 4, 5, 5, 12};
  const auto trained = train_embedding(g, std::nullopt, cfg);
  ASSERT_EQ(trained.history.size(), 8u);
  for (const auto& r : trained.history) {
    EXPECT_EQ(r.positives, g.edge_count());
    EXPECT_EQ(r.negatives, g.edge_count() + 12u * static_cast<std::size_t>(r.round));
  }
}

TEST(TrainEmbedding, LearnsBelowChanceOnPlantedPartition) {
  const Graph g = planted_partition(25, 0.3, 0.02, 9);
  const auto trained = train_embedding(g, std::nullopt, small_config(10));
  ASSERT_EQ(trained.history.size(), 1u);
  EXPECT_LE(trained.history[0].loss, std::log(2.0) + 0.05);
  EXPECT_EQ(trained.embeddings.rows(), 50);
  EXPECT_EQ(trained.embeddings.cols(), 8);
  EXPECT_TRUE(trained.embeddings.allFinite());
}

TEST(TrainEmbedding, SeparatesBridgedCliques) {
  // Drop one edge inside each clique so there are intra-clique non-edges.
  Graph base = two_bridged_cliques(6);
  std::vector<Edge> edges;
  for (const Edge& e : base.edges())
    if (!(e.u == 1 && e.v == 2) && !(e.u == 7 && e.v == 8)) edges.push_back(e);
  const Graph g = Graph::from_edges(12, edges);
  const auto trained = train_embedding(g, std::nullopt, small_config(11));
  const auto oracle = oracle_from(trained.model.predictor, trained.embeddings);
  const double intra = 0.5 * (oracle.prob(1, 2) + oracle.prob(7, 8));
  double inter = 0.0;
  int count = 0;
  for (NodeId u = 0; u < 6; ++u)
    for (NodeId v = 6; v < 12; ++v)
      if (!g.has_edge(u, v)) {
        inter += oracle.prob(u, v);
        ++count;
      }
  EXPECT_GT(intra, inter / count);
}

TEST(TrainEmbedding, DeterministicPerSeed) {
  const Graph g = planted_partition(10, 0.5, 0.1, 12);
  EmbeddingConfig cfg = small_config(13);
  cfg.schedule = {1, 2, 20, 10, 5};
  const auto a = train_embedding(g, std::nullopt, cfg);
  const auto b = train_embedding(g, std::nullopt, cfg);
  EXPECT_EQ(a.embeddings, b.embeddings);
  EXPECT_EQ(a.model.predictor.w1, b.model.predictor.w1);
  cfg.seed = 14;
  EXPECT_NE(train_embedding(g, std::nullopt, cfg).embeddings, a.embeddings);
}

TEST(TrainEmbedding, RejectsDisconnectedGraphs) {
  const Graph g = make_graph(4, {{0, 1}, {2, 3}});
  EXPECT_THROW(train_embedding(g, std::nullopt, small_config(1)), ContractViolation);
}

TEST(Ranking, Examples) {
  const std::vector<double> pos{0.9, 0.8};
  const std::vector<double> neg{0.1, 0.2, 0.3};
  const auto perfect = ranking_scores(pos, neg);
  EXPECT_DOUBLE_EQ(perfect.auc, 1.0);
  EXPECT_DOUBLE_EQ(perfect.average_precision, 1.0);
  const auto worst = ranking_scores(neg, pos);
  EXPECT_DOUBLE_EQ(worst.auc, 0.0);
  const std::vector<double> same(4, 0.5);
  EXPECT_DOUBLE_EQ(ranking_scores(same, same).auc, 0.5);
  // Positive at ranks 1 and 3: AP = (1 + 2/3) / 2.
  const auto mixed = ranking_scores(std::vector<double>{0.9, 0.5}, std::vector<double>{0.7, 0.1});
  EXPECT_DOUBLE_EQ(mixed.average_precision, (1.0 + 2.0 / 3.0) / 2.0);
  EXPECT_DOUBLE_EQ(mixed.auc, 0.75);
}

TEST(Ranking, ReversalAndRandomScores) {
  Rng rng(15);
  std::vector<double> pos(300), neg(700);
  for (double& x : pos) x = rng.uniform() + 0.2;
  for (double& x : neg) x = rng.uniform();
  const double auc = ranking_scores(pos, neg).auc;
  std::vector<double> rpos(pos), rneg(neg);
  for (double& x : rpos) x = -x;
  for (double& x : rneg) x = -x;
  EXPECT_NEAR(ranking_scores(rpos, rneg).auc, 1.0 - auc, 1e-12);

  // Constant-quality random ranking over 10^5 pairs.
  std::vector<double> a(50000), b(50000);
  for (double& x : a) x = rng.uniform();
  for (double& x : b) x = rng.uniform();
  EXPECT_NEAR(ranking_scores(a, b).auc, 0.5, 0.02);
}

TEST(Oracle, SymmetricAndMatchesPredictLink) {
  Rng rng(16);
  const LinkPredictor p = LinkPredictor::glorot(4, 3, rng);
  Matrix emb(20, 4);
  for (Eigen::Index i = 0; i < emb.size(); ++i) emb.data()[i] = rng.normal();
  const PredictorOracle oracle = oracle_from(p, emb);
  std::vector<double> row(20);
  for (NodeId i = 0; i < 20; ++i) {
    oracle.row(i, row);
    EXPECT_EQ(row[static_cast<std::size_t>(i)], 0.0);
    for (NodeId j = 0; j < 20; ++j) {
      if (i == j) continue;
      EXPECT_EQ(oracle.prob(i, j), oracle.prob(j, i));
      EXPECT_EQ(row[static_cast<std::size_t>(j)], oracle.prob(i, j));
      EXPECT_NEAR(oracle.prob(i, j), predict_link(p, emb.row(i), emb.row(j)), 1e-14);
    }
  }
  const PredictorOracle flat = oracle_from(LinkPredictor::zeros(4, 3), emb);
  EXPECT_EQ(flat.prob(3, 9), 0.5);
}

TEST(Oracle, InitialGraphKeepsTopPairs) {
  Rng rng(17);
  const LinkPredictor p = LinkPredictor::glorot(4, 3, rng);
  Matrix emb(15, 4);
  for (Eigen::Index i = 0; i < emb.size(); ++i) emb.data()[i] = rng.normal();
  const Graph g = initial_graph_from_predictor(emb, p, 20);
  EXPECT_EQ(g.edge_count(), 20u);
  const PredictorOracle oracle(p, emb);
  double weakest_kept = 1.0;
  double strongest_dropped = 0.0;
  for (NodeId u = 0; u < 15; ++u)
    for (NodeId v = u + 1; v < 15; ++v) {
      if (g.has_edge(u, v)) {
        weakest_kept = std::min(weakest_kept, oracle.prob(u, v));
      } else {
        strongest_dropped = std::max(strongest_dropped, oracle.prob(u, v));
      }
    }
  EXPECT_GE(weakest_kept, strongest_dropped);
}

TEST(EvaluatePredictor, AllPairsAndSampled) {
  const Graph g = planted_partition(10, 0.6, 0.05, 18);
  const auto trained = train_embedding(g, std::nullopt, small_config(19));
  const auto all = evaluate_predictor(trained.model.predictor, trained.embeddings, g, 0, 0);
  EXPECT_GT(all.auc, 0.5);
  EXPECT_GT(all.average_precision, 0.0);
  const auto sampled = evaluate_predictor(trained.model.predictor, trained.embeddings, g, 50, 20);
  EXPECT_GT(sampled.auc, 0.5);
  const auto flat = evaluate_predictor(LinkPredictor::zeros(8, 8), trained.embeddings, g, 0, 0);
  EXPECT_DOUBLE_EQ(flat.auc, 0.5);
}
