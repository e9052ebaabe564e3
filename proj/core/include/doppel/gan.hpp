#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "doppel/dense.hpp"
#include "doppel/embedding.hpp"

namespace doppel {

/// Generator: latent → 32 → 64 → 100 → embedding_dim + num_classes, ReLU
/// hidden layers, linear output. Real rows are standardized per column before
/// training; `shift` and `scale` undo that on sampling.
struct GeneratorParams {
  Mlp net;
  int latent_dim = 16;
  int embedding_dim = 0;
  int num_classes = 0;
  RowVector shift;  // 1 × embedding_dim
  RowVector scale;  // 1 × embedding_dim

  static GeneratorParams create(int embedding_dim, int num_classes, int latent_dim, Rng& rng);
  int output_dim() const { return embedding_dim + num_classes; }
};

/// Critic: d_in → 100 → 64 → 32 → 1, ReLU hidden layers, linear output.
struct CriticParams {
  Mlp net;

  static CriticParams create(int input_dim, Rng& rng);
};

struct GanConfig {
  int latent_dim = 16;
  double penalty = 10.0;
  int critic_steps = 5;
  int batch_size = 64;
  int generator_steps = 20000;
  AdamConfig adam{1e-4, 0.5, 0.9, 1e-8};
  bool standardize = true;
  std::uint64_t seed = 0;
  /// Record a diagnostic every this many generator steps (0 disables).
  int diagnostic_interval = 500;
  /// Rows drawn from each side for the diagnostic MMD.
  int diagnostic_samples = 500;

  void validate() const;
};

struct GanDiagnostic {
  int step = 0;
  double critic_loss = 0.0;
  double generator_loss = 0.0;
  double mmd = 0.0;
};

struct TrainedGan {
  GeneratorParams generator;
  CriticParams critic;
  std::vector<GanDiagnostic> history;
};

/// Thrown on a non-finite loss; carries the generator from the last finite step.
class GanDiverged : public std::runtime_error {
 public:
  GanDiverged(const std::string& what, GeneratorParams last_good)
      : std::runtime_error(what), last_good_(std::move(last_good)) {}
  const GeneratorParams& last_good() const { return last_good_; }

 private:
  GeneratorParams last_good_;
};

/// λ · mean_b (‖∇ₓ critic(x̂_b)‖₂ − 1)².
double gradient_penalty(const CriticParams& critic, const Matrix& interpolates, double lambda);

/// mean critic(fake) − mean critic(real) + gradient_penalty at
/// x̂ = eps ⊙ real + (1 − eps) ⊙ fake (eps one weight per row). Adds the
/// gradient with respect to the critic parameters to `grad` when given.
double critic_loss(const CriticParams& critic, const Matrix& real, const Matrix& fake, const Vector& eps,
                   double lambda, std::vector<Mlp::Layer>* grad = nullptr);

/// −mean critic(generator(latent)); adds the generator gradient to `grad`.
double generator_loss(const GeneratorParams& gen, const CriticParams& critic, const Matrix& latent,
                      std::vector<Mlp::Layer>* grad = nullptr);

using GanProgress = std::function<void(const GanDiagnostic&)>;

/// WGAN-GP on the rows of `emb`. With labels, each row is extended by the
/// one-hot vector of its class.
TrainedGan train_gan(const EmbeddingMatrix& emb, const std::optional<std::vector<int>>& labels,
                     const GanConfig& cfg, const GanProgress& progress = {});

struct GeneratedSample {
  EmbeddingMatrix embeddings;
  std::optional<std::vector<int>> labels;
};

/// `count` rows from standard-normal latents; a label block is argmax-decoded.
GeneratedSample sample_embeddings(const GeneratorParams& gen, std::size_t count, std::uint64_t seed);

/// Squared MMD, Gaussian kernel exp(−‖x−y‖² / 2σ²), biased estimate. The
/// default σ is the median pairwise distance among rows of `a` (1 when that
/// is degenerate).
double embedding_mmd(const Matrix& a, const Matrix& b);
double embedding_mmd(const Matrix& a, const Matrix& b, double bandwidth);

/// Median of the C(n,2) Euclidean distances between rows (0 for n < 2).
double median_pairwise_distance(const Matrix& x);

/// All C(n,2) Euclidean row distances, sorted ascending.
std::vector<double> pairwise_distances(const Matrix& x);

/// Fraction of pairwise distances ≤ t for each t in `grid`.
std::vector<double> pairwise_distance_cdf(const Matrix& x, std::span<const double> grid);

/// Two-sample Kolmogorov–Smirnov statistic of two samples.
double ks_distance(std::span<const double> a, std::span<const double> b);

}  // namespace doppel
