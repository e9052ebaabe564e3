#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include <Eigen/SparseCore>

#include "doppel/dense.hpp"
#include "doppel/graph.hpp"
#include "doppel/realization.hpp"

namespace doppel {

/// n × d node embeddings, one row per node.
using EmbeddingMatrix = Matrix;

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// p(u, v) = sigmoid(w2 · lrelu(W1 (z_u ∘ z_v) + b1) + b2).
struct LinkPredictor {
  Matrix w1;  // h × d
  Matrix b1;  // 1 × h
  Matrix w2;  // 1 × h
  Matrix b2;  // 1 × 1
  double leak = 0.01;

  static LinkPredictor zeros(int dim, int hidden, double leak = 0.01);
  static LinkPredictor glorot(int dim, int hidden, Rng& rng, double leak = 0.01);

  int dim() const { return static_cast<int>(w1.cols()); }
  int hidden() const { return static_cast<int>(w1.rows()); }

  /// Logits for rows of z_u ∘ z_v.
  Vector logits(const Matrix& hadamard) const;
  std::vector<NamedParam> params();
};

double sigmoid(double x);

/// Throws ContractViolation when the embedding widths disagree with the predictor.
double predict_link(const LinkPredictor& pred, const RowVector& zu, const RowVector& zv);

/// Two-layer mean-aggregation encoder:
///   H = relu(X S1 + (A X) N1 + c1),  Z = H S2 + (A H) N2 + c2
/// where A averages over neighbours. With no feature matrix X is the identity,
/// so S1 and N1 have one row per node.
struct EncoderParams {
  Matrix self1, neigh1, bias1;
  Matrix self2, neigh2, bias2;

  std::vector<NamedParam> params();
};

/// Graph-dependent constants of the encoder: mean-aggregation operator and
/// the optional dense feature matrix.
class EncoderInput {
 public:
  EncoderInput(const Graph& g, std::optional<Matrix> features = std::nullopt);

  std::size_t node_count() const { return static_cast<std::size_t>(mean_.rows()); }
  bool identity_features() const { return !features_.has_value(); }
  int feature_dim() const;

  const Eigen::SparseMatrix<double, Eigen::RowMajor>& mean_aggregator() const { return mean_; }
  /// X·W (or W itself for identity features).
  Matrix times_features(const Matrix& w) const;
  /// Xᵀ·G (or G for identity features).
  Matrix features_transpose_times(const Matrix& g) const;
  /// (A·X)·W.
  Matrix aggregated_times(const Matrix& w) const;
  /// (A·X)ᵀ·G.
  Matrix aggregated_transpose_times(const Matrix& g) const;

 private:
  Eigen::SparseMatrix<double, Eigen::RowMajor> mean_;
  std::optional<Matrix> features_;
  Matrix aggregated_features_;
};

struct LinkModel {
  EncoderParams encoder;
  LinkPredictor predictor;

  static LinkModel initialize(const EncoderInput& input, int hidden_width, int embedding_dim,
                              int predictor_hidden, double leak, Rng& rng);
  static LinkModel zeros_like(const LinkModel& m);
  std::vector<NamedParam> params();

  EmbeddingMatrix embed(const EncoderInput& input) const;
};

struct TrainingPair {
  NodeId u = 0;
  NodeId v = 0;
  double label = 0.0;
};

/// Mean binary cross-entropy of the predictor over `pairs`; when `grad` is
/// given it receives the gradient with respect to every parameter of `model`.
double link_loss(const LinkModel& model, const EncoderInput& input, std::span<const TrainingPair> pairs,
                 LinkModel* grad = nullptr);

/// Cycling negative-sampling schedule: C cycles of T rounds; round 1 trains
/// E0 epochs on a balanced set, later rounds add K unseen negatives and train
/// E1 epochs.
struct CyclingSchedule {
  int cycles = 1;
  int rounds = 20;
  int first_round_epochs = 5000;
  int later_round_epochs = 5000;
  int negatives_per_round = 2000;

  void validate() const;
};

struct EmbeddingConfig {
  int hidden_width = 128;
  int embedding_dim = 128;
  int predictor_hidden = 64;
  double leak = 0.01;
  AdamConfig adam{};
  CyclingSchedule schedule{};
  std::uint64_t seed = 0;
};

struct RoundProgress {
  int cycle = 0;
  int round = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  double loss = 0.0;
};

/// Draws negative pairs for one cycle, never repeating a pair within it.
class NegativeSampler {
 public:
  NegativeSampler(const Graph& g, Rng& rng);
  /// Up to `count` new non-edges (fewer only when the graph runs out).
  std::vector<TrainingPair> draw(std::size_t count);
  std::size_t used() const { return used_.size(); }

 private:
  const Graph& g_;
  Rng& rng_;
  std::unordered_set<std::uint64_t> used_;  // u * n + v, u < v
};

struct TrainedEmbedding {
  LinkModel model;
  EmbeddingMatrix embeddings;
  std::vector<RoundProgress> history;
};

using ProgressCallback = std::function<void(const RoundProgress&, const LinkModel&)>;

/// Trains encoder + predictor on the link prediction objective. Throws
/// TrainingDiverged on a non-finite loss.
TrainedEmbedding train_embedding(const Graph& g, const std::optional<Matrix>& features,
                                 const EmbeddingConfig& cfg, const ProgressCallback& progress = {});

struct RankingScores {
  double average_precision = 0.0;
  double auc = 0.0;
};

/// AUC (ties count one half) and average precision of positives ranked
/// above negatives.
RankingScores ranking_scores(std::span<const double> positive, std::span<const double> negative);

/// Scores every edge against all non-edges, or against `sample_negatives`
/// uniformly drawn non-edges when that is nonzero.
RankingScores evaluate_predictor(const LinkPredictor& pred, const EmbeddingMatrix& emb, const Graph& g,
                                 std::size_t sample_negatives, std::uint64_t seed);

/// Oracle over (pred, emb). Every pair is scored once up front (batched per
/// row, upper triangle only) so lookups are exactly symmetric.
class PredictorOracle final : public LinkProbabilityOracle {
 public:
  PredictorOracle(const LinkPredictor& pred, const EmbeddingMatrix& emb);
  std::size_t node_count() const override { return n_; }
  double prob(NodeId i, NodeId j) const override;
  void row(NodeId i, std::span<double> out) const override;

 private:
  std::size_t index(std::size_t i, std::size_t j) const {
    return i * n_ - i * (i + 1) / 2 + (j - i - 1);
  }

  std::size_t n_ = 0;
  std::vector<double> upper_;  // packed strict upper triangle, row by row
};

/// Probabilities of `emb` row `i` against rows [from, n) in one batched product.
Vector score_row(const LinkPredictor& pred, const EmbeddingMatrix& emb, Eigen::Index i, Eigen::Index from);

PredictorOracle oracle_from(const LinkPredictor& pred, const EmbeddingMatrix& emb);

Graph initial_graph_from_predictor(const EmbeddingMatrix& emb, const LinkPredictor& pred,
                                   std::size_t target_edges);

}  // namespace doppel
