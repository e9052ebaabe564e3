#include "doppel/gan.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace doppel {
namespace {

Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  }
  return m;
}

Matrix sample_rows(const Matrix& data, Eigen::Index count, Rng& rng) {
  Matrix out(count, data.cols());
  for (Eigen::Index i = 0; i < count; ++i) {
    out.row(i) = data.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(data.rows()))));
  }
  return out;
}

// Per-row input gradient of a ReLU critic with every activation mask held
// fixed. `u[l]` is the signal entering layer l from above after masking.
struct InputGradient {
  std::vector<Matrix> u;
  std::vector<Matrix> masks;
  Matrix g;
};

InputGradient input_gradient(const Mlp& net, const Mlp::Cache& cache, Eigen::Index batch) {
  const auto& layers = net.layers();
  const std::size_t depth = layers.size();
  InputGradient out;
  out.u.resize(depth);
  out.masks.resize(depth);
  Matrix delta = Matrix::Ones(batch, layers.back().weight.cols());
  for (std::size_t l = depth; l-- > 0;) {
    if (l + 1 != depth) {
      out.masks[l] = activation_slope(cache.pre[l], net.hidden_activation(), net.leak());
      delta = delta.cwiseProduct(out.masks[l]);
    }
    out.u[l] = delta;
    delta = delta * layers[l].weight.transpose();
  }
  out.g = delta;
  return out;
}

double penalty_and_grad(const Mlp& net, const Matrix& xhat, double lambda, std::vector<Mlp::Layer>* grad) {
  Mlp::Cache cache;
  net.forward(xhat, &cache);
  const Eigen::Index batch = xhat.rows();
  const InputGradient ig = input_gradient(net, cache, batch);
  const Vector norms = ig.g.rowwise().norm();
  const double b = static_cast<double>(batch);
  double total = 0.0;
  for (Eigen::Index i = 0; i < batch; ++i) total += (norms(i) - 1.0) * (norms(i) - 1.0);
  const double value = lambda * total / b;
  if (!grad) return value;

  // Reverse-mode through the input-gradient computation.
  Matrix adj(ig.g.rows(), ig.g.cols());
  for (Eigen::Index i = 0; i < batch; ++i) {
    const double n = norms(i);
    adj.row(i) = n > 0.0 ? RowVector(ig.g.row(i) * (2.0 * lambda * (n - 1.0) / (b * n))) : RowVector::Zero(ig.g.cols());
  }
  const auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    (*grad)[l].weight.noalias() += adj.transpose() * ig.u[l];
    if (l + 1 == layers.size()) break;
    adj = (adj * layers[l].weight).cwiseProduct(ig.masks[l]);
  }
  return value;
}

}  // namespace

GeneratorParams GeneratorParams::create(int embedding_dim, int num_classes, int latent_dim, Rng& rng) {
  if (embedding_dim < 1 || num_classes < 0 || latent_dim < 1) {
    throw ContractViolation("generator: dimensions must be positive");
  }
  GeneratorParams g;
  g.latent_dim = latent_dim;
  g.embedding_dim = embedding_dim;
  g.num_classes = num_classes;
  g.net = Mlp({latent_dim, 32, 64, 100, embedding_dim + num_classes}, Activation::kRelu, rng);
  g.shift = RowVector::Zero(embedding_dim);
  g.scale = RowVector::Ones(embedding_dim);
  return g;
}

CriticParams CriticParams::create(int input_dim, Rng& rng) {
  if (input_dim < 1) throw ContractViolation("critic: input dimension must be positive");
  return {Mlp({input_dim, 100, 64, 32, 1}, Activation::kRelu, rng)};
}

void GanConfig::validate() const {
  if (latent_dim < 1 || penalty <= 0.0 || critic_steps < 1 || batch_size < 1 || generator_steps < 0 ||
      adam.learning_rate <= 0.0 || diagnostic_interval < 0 || diagnostic_samples < 2) {
    throw ContractViolation("gan config: sizes, steps, penalty and learning rate must be positive");
  }
}

double gradient_penalty(const CriticParams& critic, const Matrix& interpolates, double lambda) {
  return penalty_and_grad(critic.net, interpolates, lambda, nullptr);
}

double critic_loss(const CriticParams& critic, const Matrix& real, const Matrix& fake, const Vector& eps,
                   double lambda, std::vector<Mlp::Layer>* grad) {
  const Eigen::Index batch = real.rows();
  if (fake.rows() != batch || eps.size() != batch || fake.cols() != real.cols()) {
    throw ContractViolation("critic_loss: real, fake and eps must have matching batch shapes");
  }
  const double b = static_cast<double>(batch);
  Mlp::Cache real_cache;
  Mlp::Cache fake_cache;
  const Matrix real_out = critic.net.forward(real, grad ? &real_cache : nullptr);
  const Matrix fake_out = critic.net.forward(fake, grad ? &fake_cache : nullptr);
  const Matrix xhat = (real.array().colwise() * eps.array() + fake.array().colwise() * (1.0 - eps.array())).matrix();
  double loss = fake_out.mean() - real_out.mean();
  loss += penalty_and_grad(critic.net, xhat, lambda, grad);
  if (grad) {
    critic.net.backward(fake_cache, Matrix::Constant(batch, 1, 1.0 / b), *grad);
    critic.net.backward(real_cache, Matrix::Constant(batch, 1, -1.0 / b), *grad);
  }
  return loss;
}

double generator_loss(const GeneratorParams& gen, const CriticParams& critic, const Matrix& latent,
                      std::vector<Mlp::Layer>* grad) {
  const Eigen::Index batch = latent.rows();
  Mlp::Cache gen_cache;
  Mlp::Cache critic_cache;
  const Matrix fake = gen.net.forward(latent, grad ? &gen_cache : nullptr);
  const Matrix out = critic.net.forward(fake, grad ? &critic_cache : nullptr);
  if (grad) {
    std::vector<Mlp::Layer> scratch = critic.net.zero_like();
    const Matrix dfake =
        critic.net.backward(critic_cache, Matrix::Constant(batch, 1, -1.0 / static_cast<double>(batch)), scratch);
    gen.net.backward(gen_cache, dfake, *grad);
  }
  return -out.mean();
}

TrainedGan train_gan(const EmbeddingMatrix& emb, const std::optional<std::vector<int>>& labels,
                     const GanConfig& cfg, const GanProgress& progress) {
  cfg.validate();
  if (emb.rows() == 0 || emb.cols() == 0) throw ContractViolation("train_gan: empty embedding matrix");
  if (!emb.allFinite()) throw ContractViolation("train_gan: embedding matrix has non-finite entries");
  const Eigen::Index n = emb.rows();
  const auto d = static_cast<int>(emb.cols());

  int classes = 0;
  if (labels) {
    if (static_cast<Eigen::Index>(labels->size()) != n) {
      throw ContractViolation("train_gan: " + std::to_string(labels->size()) + " labels for " +
                              std::to_string(n) + " rows");
    }
    for (int c : *labels) {
      if (c < 0) throw ContractViolation("train_gan: class ids must be non-negative");
      classes = std::max(classes, c + 1);
    }
  }

  Rng rng(cfg.seed);
  TrainedGan out;
  out.generator = GeneratorParams::create(d, classes, cfg.latent_dim, rng);
  out.critic = CriticParams::create(d + classes, rng);

  Matrix data(n, d + classes);
  data.leftCols(d) = emb;
  if (cfg.standardize) {
    const RowVector mean = emb.colwise().mean();
    RowVector sd = ((emb.rowwise() - mean).array().square().colwise().sum() / static_cast<double>(n)).sqrt();
    for (Eigen::Index j = 0; j < sd.size(); ++j) {
      if (sd(j) < 1e-12) sd(j) = 1.0;
    }
    out.generator.shift = mean;
    out.generator.scale = sd;
    data.leftCols(d) = ((emb.rowwise() - mean).array().rowwise() / sd.array()).matrix();
  }
  if (classes > 0) {
    data.rightCols(classes).setZero();
    for (Eigen::Index i = 0; i < n; ++i) data(i, d + (*labels)[static_cast<std::size_t>(i)]) = 1.0;
  }

  Adam critic_opt(cfg.adam);
  Adam gen_opt(cfg.adam);
  std::vector<Mlp::Layer> critic_grad = out.critic.net.zero_like();
  std::vector<Mlp::Layer> gen_grad = out.generator.net.zero_like();
  GeneratorParams last_good = out.generator;
  const Eigen::Index batch = cfg.batch_size;

  for (int step = 1; step <= cfg.generator_steps; ++step) {
    double closs = 0.0;
    for (int c = 0; c < cfg.critic_steps; ++c) {
      const Matrix real = sample_rows(data, batch, rng);
      const Matrix latent = normal_matrix(batch, cfg.latent_dim, rng);
      const Matrix fake = out.generator.net.forward(latent);
      Vector eps(batch);
      for (Eigen::Index i = 0; i < batch; ++i) eps(i) = rng.uniform();
      for (auto& l : critic_grad) {
        l.weight.setZero();
        l.bias.setZero();
      }
      closs = critic_loss(out.critic, real, fake, eps, cfg.penalty, &critic_grad);
      if (!std::isfinite(closs)) {
        throw GanDiverged("gan training diverged: critic loss " + std::to_string(closs) + " at step " +
                              std::to_string(step),
                          last_good);
      }
      critic_opt.step(out.critic.net.params("critic."), Mlp::params_of(critic_grad, "critic."));
    }

    const Matrix latent = normal_matrix(batch, cfg.latent_dim, rng);
    for (auto& l : gen_grad) {
      l.weight.setZero();
      l.bias.setZero();
    }
    const double gloss = generator_loss(out.generator, out.critic, latent, &gen_grad);
    if (!std::isfinite(gloss)) {
      throw GanDiverged("gan training diverged: generator loss " + std::to_string(gloss) + " at step " +
                            std::to_string(step),
                        last_good);
    }
    gen_opt.step(out.generator.net.params("generator."), Mlp::params_of(gen_grad, "generator."));
    bool finite = true;
    for (const auto& l : out.generator.net.layers()) finite = finite && l.weight.allFinite() && l.bias.allFinite();
    if (!finite) throw GanDiverged("gan training diverged: non-finite generator weights", last_good);
    last_good = out.generator;

    if (cfg.diagnostic_interval > 0 && (step % cfg.diagnostic_interval == 0 || step == cfg.generator_steps)) {
      // Separate stream so diagnostics never perturb training.
      Rng diag(derive_seed(cfg.seed, static_cast<std::uint64_t>(step)));
      const Eigen::Index m = std::min<Eigen::Index>(n, cfg.diagnostic_samples);
      const Matrix real = sample_rows(data, m, diag);
      const Matrix fake = out.generator.net.forward(normal_matrix(m, cfg.latent_dim, diag));
      GanDiagnostic record{step, closs, gloss, embedding_mmd(real, fake)};
      out.history.push_back(record);
      if (progress) progress(record);
    }
  }
  return out;
}

GeneratedSample sample_embeddings(const GeneratorParams& gen, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw ContractViolation("sample_embeddings: count must be at least 1");
  Rng rng(seed);
  const Matrix raw = gen.net.forward(normal_matrix(static_cast<Eigen::Index>(count), gen.latent_dim, rng));
  GeneratedSample out;
  out.embeddings =
      ((raw.leftCols(gen.embedding_dim).array().rowwise() * gen.scale.array()).rowwise() + gen.shift.array())
          .matrix();
  if (gen.num_classes > 0) {
    std::vector<int> labels(count);
    for (std::size_t i = 0; i < count; ++i) {
      Eigen::Index best = 0;
      raw.row(static_cast<Eigen::Index>(i)).rightCols(gen.num_classes).maxCoeff(&best);
      labels[i] = static_cast<int>(best);
    }
    out.labels = std::move(labels);
  }
  return out;
}

std::vector<double> pairwise_distances(const Matrix& x) {
  const Eigen::Index n = x.rows();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n * (n > 0 ? n - 1 : 0) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) out.push_back((x.row(i) - x.row(j)).norm());
  }
  std::sort(out.begin(), out.end());
  return out;
}

double median_pairwise_distance(const Matrix& x) {
  const std::vector<double> d = pairwise_distances(x);
  if (d.empty()) return 0.0;
  const std::size_t k = d.size() / 2;
  return d.size() % 2 == 1 ? d[k] : 0.5 * (d[k - 1] + d[k]);
}

double embedding_mmd(const Matrix& a, const Matrix& b) {
  double bandwidth = median_pairwise_distance(a);
  if (bandwidth < 1e-8) bandwidth = 1.0;
  return embedding_mmd(a, b, bandwidth);
}

double embedding_mmd(const Matrix& a, const Matrix& b, double bandwidth) {
  if (a.cols() != b.cols()) {
    throw ContractViolation("embedding_mmd: dimension mismatch " + std::to_string(a.cols()) + " vs " +
                            std::to_string(b.cols()));
  }
  if (a.rows() == 0 || b.rows() == 0) throw ContractViolation("embedding_mmd: empty sample");
  if (!(bandwidth > 0.0)) throw ContractViolation("embedding_mmd: bandwidth must be positive");
  const double scale = -1.0 / (2.0 * bandwidth * bandwidth);
  auto mean_kernel = [scale](const Matrix& x, const Matrix& y) {
    const Vector xn = x.rowwise().squaredNorm();
    const Vector yn = y.rowwise().squaredNorm();
    Matrix d2 = -2.0 * x * y.transpose();
    d2.colwise() += xn;
    d2.rowwise() += yn.transpose();
    return (d2.cwiseMax(0.0) * scale).array().exp().mean();
  };
  const double value = mean_kernel(a, a) + mean_kernel(b, b) - 2.0 * mean_kernel(a, b);
  return std::max(value, 0.0);
}

std::vector<double> pairwise_distance_cdf(const Matrix& x, std::span<const double> grid) {
  const std::vector<double> d = pairwise_distances(x);
  std::vector<double> out;
  out.reserve(grid.size());
  for (double t : grid) {
    if (d.empty()) {
      out.push_back(1.0);
      continue;
    }
    const auto below = std::upper_bound(d.begin(), d.end(), t) - d.begin();
    out.push_back(static_cast<double>(below) / static_cast<double>(d.size()));
  }
  return out;
}

double ks_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ContractViolation("ks_distance: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double best = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    best = std::max(best, std::fabs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return best;
}

}  // namespace doppel
