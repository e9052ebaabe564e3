#include "doppel/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace doppel {
namespace {

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::fabs(x))); }

Matrix gather_rows(const Matrix& m, std::span<const TrainingPair> pairs, bool first) {
  Matrix out(static_cast<Eigen::Index>(pairs.size()), m.cols());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(first ? pairs[i].u : pairs[i].v);
  }
  return out;
}

}  // namespace

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

LinkPredictor LinkPredictor::zeros(int dim, int hidden, double leak) {
  return {Matrix::Zero(hidden, dim), Matrix::Zero(1, hidden), Matrix::Zero(1, hidden), Matrix::Zero(1, 1), leak};
}

LinkPredictor LinkPredictor::glorot(int dim, int hidden, Rng& rng, double leak) {
  LinkPredictor p = zeros(dim, hidden, leak);
  p.w1 = glorot_uniform(hidden, dim, rng);
  p.w2 = glorot_uniform(1, hidden, rng);
  return p;
}

Vector LinkPredictor::logits(const Matrix& hadamard) const {
  Matrix pre = hadamard * w1.transpose();
  pre.rowwise() += b1.row(0);
  const Matrix act = activate(pre, Activation::kLeakyRelu, leak);
  Vector s = act * w2.transpose();
  s.array() += b2(0, 0);
  return s;
}

std::vector<NamedParam> LinkPredictor::params() {
  return {{"predictor.w1", &w1}, {"predictor.b1", &b1}, {"predictor.w2", &w2}, {"predictor.b2", &b2}};
}

double predict_link(const LinkPredictor& pred, const RowVector& zu, const RowVector& zv) {
  if (zu.size() != pred.dim() || zv.size() != pred.dim()) {
    throw ContractViolation("predict_link: embedding width " + std::to_string(zu.size()) + "/" +
                            std::to_string(zv.size()) + " does not match predictor width " +
                            std::to_string(pred.dim()));
  }
  const Matrix h = zu.cwiseProduct(zv);
  return sigmoid(pred.logits(h)(0));
}

std::vector<NamedParam> EncoderParams::params() {
  return {{"encoder.self1", &self1}, {"encoder.neigh1", &neigh1}, {"encoder.bias1", &bias1},
          {"encoder.self2", &self2}, {"encoder.neigh2", &neigh2}, {"encoder.bias2", &bias2}};
}

EncoderInput::EncoderInput(const Graph& g, std::optional<Matrix> features) : features_(std::move(features)) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  if (features_ && features_->rows() != n) {
    throw ContractViolation("encoder: feature matrix has " + std::to_string(features_->rows()) +
                            " rows for " + std::to_string(n) + " nodes");
  }
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(g.edge_count() * 2);
  for (Eigen::Index u = 0; u < n; ++u) {
    const auto nb = g.neighbors(static_cast<NodeId>(u));
    for (NodeId v : nb) entries.emplace_back(u, v, 1.0 / static_cast<double>(nb.size()));
  }
  mean_.resize(n, n);
  mean_.setFromTriplets(entries.begin(), entries.end());
  if (features_) aggregated_features_ = mean_ * (*features_);
}

int EncoderInput::feature_dim() const {
  return features_ ? static_cast<int>(features_->cols()) : static_cast<int>(node_count());
}

Matrix EncoderInput::times_features(const Matrix& w) const { return features_ ? Matrix(*features_ * w) : w; }

Matrix EncoderInput::features_transpose_times(const Matrix& g) const {
  return features_ ? Matrix(features_->transpose() * g) : g;
}

Matrix EncoderInput::aggregated_times(const Matrix& w) const {
  return features_ ? Matrix(aggregated_features_ * w) : Matrix(mean_ * w);
}

Matrix EncoderInput::aggregated_transpose_times(const Matrix& g) const {
  return features_ ? Matrix(aggregated_features_.transpose() * g) : Matrix(mean_.transpose() * g);
}

LinkModel LinkModel::initialize(const EncoderInput& input, int hidden_width, int embedding_dim,
                                int predictor_hidden, double leak, Rng& rng) {
  const int f = input.feature_dim();
  LinkModel m;
  m.encoder.self1 = glorot_uniform(f, hidden_width, rng);
  m.encoder.neigh1 = glorot_uniform(f, hidden_width, rng);
  m.encoder.bias1 = Matrix::Zero(1, hidden_width);
  m.encoder.self2 = glorot_uniform(hidden_width, embedding_dim, rng);
  m.encoder.neigh2 = glorot_uniform(hidden_width, embedding_dim, rng);
  m.encoder.bias2 = Matrix::Zero(1, embedding_dim);
  m.predictor = LinkPredictor::glorot(embedding_dim, predictor_hidden, rng, leak);
  return m;
}

LinkModel LinkModel::zeros_like(const LinkModel& m) {
  LinkModel z = m;
  for (auto& p : z.params()) p.value->setZero();
  return z;
}

std::vector<NamedParam> LinkModel::params() {
  auto out = encoder.params();
  for (auto& p : predictor.params()) out.push_back(p);
  return out;
}

namespace {

struct EncoderPass {
  Matrix pre1;
  Matrix hidden;
  Matrix aggregated_hidden;
  Matrix z;
};

EncoderPass encode(const EncoderParams& p, const EncoderInput& input) {
  EncoderPass pass;
  pass.pre1 = input.times_features(p.self1) + input.aggregated_times(p.neigh1);
  pass.pre1.rowwise() += p.bias1.row(0);
  pass.hidden = pass.pre1.cwiseMax(0.0);
  pass.aggregated_hidden = input.mean_aggregator() * pass.hidden;
  pass.z = pass.hidden * p.self2 + pass.aggregated_hidden * p.neigh2;
  pass.z.rowwise() += p.bias2.row(0);
  return pass;
}

}  // namespace

EmbeddingMatrix LinkModel::embed(const EncoderInput& input) const { return encode(encoder, input).z; }

double link_loss(const LinkModel& model, const EncoderInput& input, std::span<const TrainingPair> pairs,
                 LinkModel* grad) {
  if (pairs.empty()) return 0.0;
  const EncoderPass pass = encode(model.encoder, input);
  const LinkPredictor& pred = model.predictor;
  const Matrix zu = gather_rows(pass.z, pairs, true);
  const Matrix zv = gather_rows(pass.z, pairs, false);
  const Matrix had = zu.cwiseProduct(zv);
  Matrix pre = had * pred.w1.transpose();
  pre.rowwise() += pred.b1.row(0);
  const Matrix act = activate(pre, Activation::kLeakyRelu, pred.leak);
  Vector s = act * pred.w2.transpose();
  s.array() += pred.b2(0, 0);

  const auto count = static_cast<double>(pairs.size());
  std::vector<double> terms(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double logit = s(static_cast<Eigen::Index>(i));
    terms[i] = softplus(logit) - pairs[i].label * logit;
  }
  double loss = 0.0;
  for (double t : terms) loss += t;
  loss /= count;
  if (!grad) return loss;

  Vector ds(s.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    ds(k) = (sigmoid(s(k)) - pairs[i].label) / count;
  }
  LinkPredictor& gp = grad->predictor;
  gp.w2 = ds.transpose() * act;
  gp.b2(0, 0) = ds.sum();
  const Matrix dpre = (ds * pred.w2).cwiseProduct(activation_slope(pre, Activation::kLeakyRelu, pred.leak));
  gp.w1 = dpre.transpose() * had;
  gp.b1 = dpre.colwise().sum();
  const Matrix dhad = dpre * pred.w1;

  Matrix dz = Matrix::Zero(pass.z.rows(), pass.z.cols());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    dz.row(pairs[i].u) += dhad.row(k).cwiseProduct(zv.row(k));
    dz.row(pairs[i].v) += dhad.row(k).cwiseProduct(zu.row(k));
  }

  EncoderParams& ge = grad->encoder;
  const EncoderParams& pe = model.encoder;
  ge.self2 = pass.hidden.transpose() * dz;
  ge.neigh2 = pass.aggregated_hidden.transpose() * dz;
  ge.bias2 = dz.colwise().sum();
  Matrix dhidden = dz * pe.self2.transpose();
  dhidden += input.mean_aggregator().transpose() * (dz * pe.neigh2.transpose());
  const Matrix dpre1 = dhidden.cwiseProduct(activation_slope(pass.pre1, Activation::kRelu));
  ge.self1 = input.features_transpose_times(dpre1);
  ge.neigh1 = input.aggregated_transpose_times(dpre1);
  ge.bias1 = dpre1.colwise().sum();
  return loss;
}

void CyclingSchedule::validate() const {
  if (cycles < 1 || rounds < 1 || first_round_epochs < 1 || later_round_epochs < 1 || negatives_per_round < 1) {
    throw ContractViolation("cycling schedule: C, T, E0, E1 and K must all be positive");
  }
}

NegativeSampler::NegativeSampler(const Graph& g, Rng& rng) : g_(g), rng_(rng) {}

std::vector<TrainingPair> NegativeSampler::draw(std::size_t count) {
  const std::uint64_t n = g_.node_count();
  const std::uint64_t pairs = n * (n > 0 ? n - 1 : 0) / 2;
  const std::uint64_t available = pairs - g_.edge_count() - used_.size();
  std::vector<TrainingPair> out;
  if (available == 0 || count == 0) return out;

  if (count * 2 >= available) {
    // Dense regime: enumerate what is left and take a random subset.
    std::vector<TrainingPair> rest;
    rest.reserve(available);
    for (std::uint64_t u = 0; u < n; ++u) {
      for (std::uint64_t v = u + 1; v < n; ++v) {
        if (used_.count(u * n + v) || g_.has_edge(static_cast<NodeId>(u), static_cast<NodeId>(v))) continue;
        rest.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v), 0.0});
      }
    }
    const std::size_t take = std::min<std::size_t>(count, rest.size());
    for (std::size_t i = 0; i < take; ++i) {
      std::swap(rest[i], rest[i + rng_.below(rest.size() - i)]);
      used_.insert(static_cast<std::uint64_t>(rest[i].u) * n + static_cast<std::uint64_t>(rest[i].v));
    }
    rest.resize(take);
    return rest;
  }

  out.reserve(count);
  while (out.size() < count) {
    auto u = rng_.below(n);
    auto v = rng_.below(n);
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (g_.has_edge(static_cast<NodeId>(u), static_cast<NodeId>(v))) continue;
    if (!used_.insert(u * n + v).second) continue;
    out.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v), 0.0});
  }
  return out;
}

TrainedEmbedding train_embedding(const Graph& g, const std::optional<Matrix>& features,
                                 const EmbeddingConfig& cfg, const ProgressCallback& progress) {
  cfg.schedule.validate();
  if (g.node_count() < 2 || g.edge_count() == 0) throw ContractViolation("train_embedding: graph has no edges");
  std::size_t components = 0;
  connected_components(g, &components);
  if (components != 1) throw ContractViolation("train_embedding: graph must be connected (pass its LCC)");

  const EncoderInput input(g, features);
  Rng rng(cfg.seed);
  TrainedEmbedding out;
  out.model = LinkModel::initialize(input, cfg.hidden_width, cfg.embedding_dim, cfg.predictor_hidden, cfg.leak, rng);
  Adam adam(cfg.adam);

  std::vector<TrainingPair> positives;
  for (const Edge& e : g.edges()) positives.push_back({e.u, e.v, 1.0});

  LinkModel grad = LinkModel::zeros_like(out.model);
  for (int cycle = 0; cycle < cfg.schedule.cycles; ++cycle) {
    // Warm start: parameters carry over, the training set is rebuilt.
    NegativeSampler sampler(g, rng);
    std::vector<TrainingPair> train = positives;
    auto first = sampler.draw(positives.size());
    train.insert(train.end(), first.begin(), first.end());
    for (int round = 0; round < cfg.schedule.rounds; ++round) {
      if (round > 0) {
        auto extra = sampler.draw(static_cast<std::size_t>(cfg.schedule.negatives_per_round));
        train.insert(train.end(), extra.begin(), extra.end());
      }
      const int epochs = round == 0 ? cfg.schedule.first_round_epochs : cfg.schedule.later_round_epochs;
      double loss = 0.0;
      for (int epoch = 0; epoch < epochs; ++epoch) {
        loss = link_loss(out.model, input, train, &grad);
        if (!std::isfinite(loss)) {
          throw TrainingDiverged("embedding training diverged: loss " + std::to_string(loss) + " at cycle " +
                                 std::to_string(cycle + 1) + ", round " + std::to_string(round + 1) +
                                 ", epoch " + std::to_string(epoch + 1));
        }
        adam.step(out.model.params(), grad.params());
      }
      RoundProgress rp{cycle, round, positives.size(), train.size() - positives.size(), loss};
      out.history.push_back(rp);
      if (progress) progress(rp, out.model);
    }
  }
  out.embeddings = out.model.embed(input);
  return out;
}

RankingScores ranking_scores(std::span<const double> positive, std::span<const double> negative) {
  struct Item {
    double score;
    bool positive;
  };
  std::vector<Item> items;
  items.reserve(positive.size() + negative.size());
  for (double s : positive) items.push_back({s, true});
  for (double s : negative) items.push_back({s, false});
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.score > b.score; });

  const auto p = static_cast<double>(positive.size());
  const auto q = static_cast<double>(negative.size());
  RankingScores out;
  if (p == 0 || q == 0) return out;

  // Walk tie groups from the top. AUC counts each (pos, neg) pair ranked
  // correctly as 1 and tied as 1/2; AP sums precision × recall increments.
  double negatives_above = 0.0;
  double tp = 0.0;
  double fp = 0.0;
  double correct = 0.0;
  double ap = 0.0;
  for (std::size_t i = 0; i < items.size();) {
    std::size_t j = i;
    double group_pos = 0.0;
    double group_neg = 0.0;
    while (j < items.size() && items[j].score == items[i].score) {
      (items[j].positive ? group_pos : group_neg) += 1.0;
      ++j;
    }
    correct += group_pos * (q - negatives_above - group_neg) + 0.5 * group_pos * group_neg;
    negatives_above += group_neg;
    tp += group_pos;
    fp += group_neg;
    if (group_pos > 0) ap += (group_pos / p) * (tp / (tp + fp));
    i = j;
  }
  out.auc = correct / (p * q);
  out.average_precision = ap;
  return out;
}

Vector score_row(const LinkPredictor& pred, const EmbeddingMatrix& emb, Eigen::Index i, Eigen::Index from) {
  const Eigen::Index count = emb.rows() - from;
  if (count <= 0) return Vector();
  const Matrix had = emb.bottomRows(count).array().rowwise() * emb.row(i).array();
  Vector s = pred.logits(had);
  return s.unaryExpr([](double x) { return sigmoid(x); });
}

RankingScores evaluate_predictor(const LinkPredictor& pred, const EmbeddingMatrix& emb, const Graph& g,
                                 std::size_t sample_negatives, std::uint64_t seed) {
  if (static_cast<std::size_t>(emb.rows()) != g.node_count()) {
    throw ContractViolation("evaluate_predictor: embedding rows differ from node count");
  }
  std::vector<double> pos;
  std::vector<double> neg;
  if (sample_negatives == 0) {
    const PredictorOracle oracle(pred, emb);
    std::vector<double> row(g.node_count());
    for (std::size_t u = 0; u < g.node_count(); ++u) {
      oracle.row(static_cast<NodeId>(u), row);
      for (std::size_t v = u + 1; v < g.node_count(); ++v) {
        (g.has_edge(static_cast<NodeId>(u), static_cast<NodeId>(v)) ? pos : neg).push_back(row[v]);
      }
    }
  } else {
    for (const Edge& e : g.edges()) pos.push_back(predict_link(pred, emb.row(e.u), emb.row(e.v)));
    Rng rng(seed);
    NegativeSampler sampler(g, rng);
    for (const auto& pair : sampler.draw(sample_negatives)) {
      neg.push_back(predict_link(pred, emb.row(pair.u), emb.row(pair.v)));
    }
  }
  return ranking_scores(pos, neg);
}

PredictorOracle::PredictorOracle(const LinkPredictor& pred, const EmbeddingMatrix& emb)
    : n_(static_cast<std::size_t>(emb.rows())) {
  if (emb.cols() != pred.dim()) throw ContractViolation("oracle: embedding width differs from predictor width");
  upper_.reserve(n_ * (n_ > 0 ? n_ - 1 : 0) / 2);
  for (std::size_t i = 0; i + 1 < n_; ++i) {
    const Vector p = score_row(pred, emb, static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + 1));
    upper_.insert(upper_.end(), p.data(), p.data() + p.size());
  }
}

double PredictorOracle::prob(NodeId i, NodeId j) const {
  if (i == j) return 0.0;
  if (i > j) std::swap(i, j);
  return upper_[index(static_cast<std::size_t>(i), static_cast<std::size_t>(j))];
}

void PredictorOracle::row(NodeId i, std::span<double> out) const {
  const auto r = static_cast<std::size_t>(i);
  for (std::size_t j = 0; j < r; ++j) out[j] = upper_[index(j, r)];
  out[r] = 0.0;
  if (r + 1 < n_) std::copy_n(upper_.begin() + static_cast<std::ptrdiff_t>(index(r, r + 1)), n_ - r - 1, out.begin() + static_cast<std::ptrdiff_t>(r + 1));
}

PredictorOracle oracle_from(const LinkPredictor& pred, const EmbeddingMatrix& emb) { return {pred, emb}; }

Graph initial_graph_from_predictor(const EmbeddingMatrix& emb, const LinkPredictor& pred,
                                   std::size_t target_edges) {
  return initial_graph_from_oracle(oracle_from(pred, emb), target_edges);
}

}  // namespace doppel
