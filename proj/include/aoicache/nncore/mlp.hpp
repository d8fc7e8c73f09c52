#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "aoicache/rng.hpp"

namespace aoicache::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Weights and biases of a fully connected stack. Layer l maps
/// sizes[l] -> sizes[l+1]; weights[l] is (sizes[l+1] x sizes[l]).
/// Gradients and Adam moments reuse this type so shapes always line up.
struct ParamSet {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  static ParamSet zeros_like(const ParamSet& other);

  std::size_t parameter_count() const;
  bool all_finite() const;
  bool same_shape(const ParamSet& other) const;

  /// Flat copy in layer order (weights column-major, then bias).
  std::vector<double> flatten() const;
  void unflatten(std::span<const double> flat);

  /// Visits every (param, other) scalar pair in flatten() order.
  template <typename Fn>
  void zip_apply(ParamSet& other, Fn&& fn);
};

enum class Activation { relu_hidden_linear_out };

/// Multilayer perceptron: ReLU on hidden layers, linear output layer.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<std::size_t> layer_sizes);

  /// Uniform(+-1/sqrt(fan_in)) initialization for weights and biases.
  static Mlp make_random(std::vector<std::size_t> layer_sizes, Rng& rng);

  /// Input, three hidden layers of equal width, output.
  static Mlp make_standard(std::size_t inputs, std::size_t hidden, std::size_t outputs,
                           Rng& rng);

  const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
  std::size_t input_size() const { return sizes_.front(); }
  std::size_t output_size() const { return sizes_.back(); }
  std::size_t num_layers() const { return sizes_.size() - 1; }

  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }

  Vector forward(const Vector& input) const;
  Matrix forward(const Matrix& inputs) const;

 private:
  std::vector<std::size_t> sizes_;
  ParamSet params_;
};

/// Intermediate values of one batched forward pass: the layer inputs and
/// pre-activations needed to run reverse mode afterwards.
struct Tape {
  std::vector<std::size_t> sizes;
  std::vector<Matrix> inputs;  // inputs[l] feeds layer l
  std::vector<Matrix> pre;     // pre-activation of layer l
  Matrix output;

  bool recorded() const { return !inputs.empty(); }
  Eigen::Index batch_size() const { return output.cols(); }
};

struct Backprop {
  ParamSet grads;
  Matrix input_grad;  // empty unless requested
};

/// Forward pass over a batch (columns are samples), recording a tape.
Tape record_forward(const Mlp& net, const Matrix& inputs);

/// Reverse-mode pass. `output_adjoint` is dLoss/dOutput with the same shape
/// as the tape's output. Throws UsageError on an empty tape.
Backprop backward(const Mlp& net, const Tape& tape, const Matrix& output_adjoint,
                  bool want_input_grad = false);

/// Mean squared error over all entries plus its adjoint w.r.t. `pred`.
struct LossGrad {
  double value = 0.0;
  Matrix adjoint;
};
LossGrad mse(const Matrix& pred, const Matrix& target);

/// target <- tau * source + (1 - tau) * target, elementwise.
void soft_update(ParamSet& target, const ParamSet& source, double tau);

template <typename Fn>
void ParamSet::zip_apply(ParamSet& other, Fn&& fn) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    double* a = weights[l].data();
    double* b = other.weights[l].data();
    for (Eigen::Index i = 0; i < weights[l].size(); ++i) fn(a[i], b[i]);
    double* c = biases[l].data();
    double* d = other.biases[l].data();
    for (Eigen::Index i = 0; i < biases[l].size(); ++i) fn(c[i], d[i]);
  }
}

}  // namespace aoicache::nn
