#include "doppel/dense.hpp"

#include <cmath>
#include <stdexcept>

namespace doppel {

Matrix activate(const Matrix& pre, Activation act, double leak) {
  switch (act) {
    case Activation::kIdentity:
      return pre;
    case Activation::kRelu:
      return pre.cwiseMax(0.0);
    case Activation::kLeakyRelu:
      return pre.unaryExpr([leak](double x) { return x > 0.0 ? x : leak * x; });
  }
  return pre;
}

Matrix activation_slope(const Matrix& pre, Activation act, double leak) {
  switch (act) {
    case Activation::kIdentity:
      return Matrix::Ones(pre.rows(), pre.cols());
    case Activation::kRelu:
      return pre.unaryExpr([](double x) { return x > 0.0 ? 1.0 : 0.0; });
    case Activation::kLeakyRelu:
      return pre.unaryExpr([leak](double x) { return x > 0.0 ? 1.0 : leak; });
  }
  return Matrix::Ones(pre.rows(), pre.cols());
}

Matrix glorot_uniform(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix w(rows, cols);
  // Fill order is part of the determinism contract: row by row.
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) w(i, j) = rng.uniform(-limit, limit);
  }
  return w;
}

Mlp::Mlp(const std::vector<int>& sizes, Activation hidden, Rng& rng, double leak)
    : hidden_(hidden), leak_(leak) {
  if (sizes.size() < 2) throw std::invalid_argument("Mlp needs at least input and output sizes");
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    layers_.push_back({glorot_uniform(sizes[i], sizes[i + 1], rng), Matrix::Zero(1, sizes[i + 1])});
  }
}

Matrix Mlp::forward(const Matrix& x, Cache* cache) const {
  if (cache) {
    cache->inputs.clear();
    cache->pre.clear();
  }
  Matrix a = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Matrix z = a * layers_[l].weight;
    z.rowwise() += layers_[l].bias.row(0);
    if (cache) {
      cache->inputs.push_back(a);
      cache->pre.push_back(z);
    }
    a = (l + 1 == layers_.size()) ? z : activate(z, hidden_, leak_);
  }
  return a;
}

Matrix Mlp::backward(const Cache& cache, const Matrix& grad_out, std::vector<Layer>& grads) const {
  Matrix delta = grad_out;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    if (l + 1 != layers_.size()) delta = delta.cwiseProduct(activation_slope(cache.pre[l], hidden_, leak_));
    grads[l].weight.noalias() += cache.inputs[l].transpose() * delta;
    grads[l].bias += delta.colwise().sum();
    delta = delta * layers_[l].weight.transpose();
  }
  return delta;
}

std::vector<Mlp::Layer> Mlp::zero_like() const {
  std::vector<Layer> out;
  for (const auto& l : layers_) {
    out.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()), Matrix::Zero(1, l.bias.cols())});
  }
  return out;
}

std::vector<NamedParam> Mlp::params_of(std::vector<Layer>& layers, const std::string& prefix) {
  std::vector<NamedParam> out;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    out.push_back({prefix + "fc" + std::to_string(i) + ".weight", &layers[i].weight});
    out.push_back({prefix + "fc" + std::to_string(i) + ".bias", &layers[i].bias});
  }
  return out;
}

std::vector<NamedParam> Mlp::params(const std::string& prefix) { return params_of(layers_, prefix); }

std::vector<int> Mlp::sizes() const {
  std::vector<int> s;
  if (layers_.empty()) return s;
  s.push_back(static_cast<int>(layers_.front().weight.rows()));
  for (const auto& l : layers_) s.push_back(static_cast<int>(l.weight.cols()));
  return s;
}

void Adam::step(const std::vector<NamedParam>& params, const std::vector<NamedParam>& grads) {
  if (params.size() != grads.size()) throw std::invalid_argument("Adam: parameter/gradient count mismatch");
  if (m_.empty()) {
    for (const auto& p : params) {
      m_.push_back(Matrix::Zero(p.value->rows(), p.value->cols()));
      v_.push_back(Matrix::Zero(p.value->rows(), p.value->cols()));
    }
  }
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  const double step = cfg_.learning_rate * std::sqrt(c2) / c1;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Matrix& g = *grads[i].value;
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * g;
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * g.cwiseAbs2();
    *params[i].value -= (step * m_[i].array() / (v_[i].array().sqrt() + cfg_.epsilon)).matrix();
  }
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace doppel
