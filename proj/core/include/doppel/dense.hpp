#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "doppel/random.hpp"

namespace doppel {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

enum class Activation { kIdentity, kRelu, kLeakyRelu };

/// Elementwise activation and its derivative (taken as 0 at the kink).
Matrix activate(const Matrix& pre, Activation act, double leak = 0.01);
Matrix activation_slope(const Matrix& pre, Activation act, double leak = 0.01);

/// Glorot-uniform weights of shape rows×cols.
Matrix glorot_uniform(Eigen::Index rows, Eigen::Index cols, Rng& rng);

/// A parameter tensor with a stable name, for optimizers and serialization.
struct NamedParam {
  std::string name;
  Matrix* value;
};

/// Fully connected network acting on row-major batches (one sample per row).
/// Hidden layers share one activation; the output layer is linear.
class Mlp {
 public:
  struct Layer {
    Matrix weight;  // in × out
    Matrix bias;    // 1 × out
  };

  /// Intermediate values of one forward pass.
  struct Cache {
    std::vector<Matrix> inputs;  // input to each layer
    std::vector<Matrix> pre;     // pre-activation of each layer
  };

  Mlp() = default;
  /// `sizes` = {in, hidden..., out}.
  Mlp(const std::vector<int>& sizes, Activation hidden, Rng& rng, double leak = 0.01);

  Matrix forward(const Matrix& x, Cache* cache = nullptr) const;

  /// Accumulates parameter gradients of Σ grad_out ⊙ output into `grads`
  /// and returns the gradient with respect to the input.
  Matrix backward(const Cache& cache, const Matrix& grad_out, std::vector<Layer>& grads) const;

  std::vector<Layer> zero_like() const;
  std::vector<NamedParam> params(const std::string& prefix);
  static std::vector<NamedParam> params_of(std::vector<Layer>& layers, const std::string& prefix);

  int input_dim() const { return layers_.empty() ? 0 : static_cast<int>(layers_.front().weight.rows()); }
  int output_dim() const { return layers_.empty() ? 0 : static_cast<int>(layers_.back().weight.cols()); }
  std::vector<int> sizes() const;

  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }
  Activation hidden_activation() const { return hidden_; }
  double leak() const { return leak_; }
  void set_activation(Activation hidden, double leak) {
    hidden_ = hidden;
    leak_ = leak;
  }

 private:
  std::vector<Layer> layers_;
  Activation hidden_ = Activation::kRelu;
  double leak_ = 0.01;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam over a fixed list of parameter matrices; moment buffers are sized on
/// the first step.
class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

  void step(const std::vector<NamedParam>& params, const std::vector<NamedParam>& grads);
  void reset() {
    m_.clear();
    v_.clear();
    t_ = 0;
  }
  long long steps() const { return t_; }

 private:
  AdamConfig cfg_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  long long t_ = 0;
};

bool all_finite(const Matrix& m);

}  // namespace doppel
