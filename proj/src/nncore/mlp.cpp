#include "aoicache/nncore/mlp.hpp"

#include <cmath>
#include <string>

#include "aoicache/errors.hpp"

namespace aoicache::nn {

namespace {

void check_sizes(const std::vector<std::size_t>& sizes) {
  if (sizes.size() < 2) throw ConfigError("mlp needs at least an input and an output layer");
  for (auto s : sizes)
    if (s == 0) throw ConfigError("mlp layer sizes must be positive");
}

std::string shape_str(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

ParamSet ParamSet::zeros_like(const ParamSet& other) {
  ParamSet p;
  p.weights.reserve(other.weights.size());
  p.biases.reserve(other.biases.size());
  for (const auto& w : other.weights) p.weights.push_back(Matrix::Zero(w.rows(), w.cols()));
  for (const auto& b : other.biases) p.biases.push_back(Vector::Zero(b.size()));
  return p;
}

std::size_t ParamSet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += static_cast<std::size_t>(w.size());
  for (const auto& b : biases) n += static_cast<std::size_t>(b.size());
  return n;
}

bool ParamSet::all_finite() const {
  for (const auto& w : weights)
    if (!w.allFinite()) return false;
  for (const auto& b : biases)
    if (!b.allFinite()) return false;
  return true;
}

bool ParamSet::same_shape(const ParamSet& other) const {
  if (weights.size() != other.weights.size() || biases.size() != other.biases.size()) return false;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != other.weights[l].rows() ||
        weights[l].cols() != other.weights[l].cols())
      return false;
    if (biases[l].size() != other.biases[l].size()) return false;
  }
  return true;
}

std::vector<double> ParamSet::flatten() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (std::size_t l = 0; l < weights.size(); ++l) {
    flat.insert(flat.end(), weights[l].data(), weights[l].data() + weights[l].size());
    flat.insert(flat.end(), biases[l].data(), biases[l].data() + biases[l].size());
  }
  return flat;
}

void ParamSet::unflatten(std::span<const double> flat) {
  if (flat.size() != parameter_count())
    throw ConfigError("flat parameter count " + std::to_string(flat.size()) + " != expected " +
                      std::to_string(parameter_count()));
  std::size_t k = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (Eigen::Index i = 0; i < weights[l].size(); ++i) weights[l].data()[i] = flat[k++];
    for (Eigen::Index i = 0; i < biases[l].size(); ++i) biases[l].data()[i] = flat[k++];
  }
}

Mlp::Mlp(std::vector<std::size_t> layer_sizes) : sizes_(std::move(layer_sizes)) {
  check_sizes(sizes_);
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(sizes_[l]);
    const auto out = static_cast<Eigen::Index>(sizes_[l + 1]);
    params_.weights.push_back(Matrix::Zero(out, in));
    params_.biases.push_back(Vector::Zero(out));
  }
}

Mlp Mlp::make_random(std::vector<std::size_t> layer_sizes, Rng& rng) {
  Mlp net(std::move(layer_sizes));
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(net.sizes_[l]));
    std::uniform_real_distribution<double> dist(-bound, bound);
    auto& w = net.params_.weights[l];
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = dist(rng);
    auto& b = net.params_.biases[l];
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = dist(rng);
  }
  return net;
}

Mlp Mlp::make_standard(std::size_t inputs, std::size_t hidden, std::size_t outputs, Rng& rng) {
  return make_random({inputs, hidden, hidden, hidden, outputs}, rng);
}

Vector Mlp::forward(const Vector& input) const {
  Matrix m = input;
  return forward(m).col(0);
}

Matrix Mlp::forward(const Matrix& inputs) const {
  if (static_cast<std::size_t>(inputs.rows()) != input_size())
    throw ConfigError("mlp input has " + std::to_string(inputs.rows()) + " features, expected " +
                      std::to_string(input_size()));
  Matrix act = inputs;
  const std::size_t last = num_layers() - 1;
  for (std::size_t l = 0; l <= last; ++l) {
    Matrix z = params_.weights[l] * act;
    z.colwise() += params_.biases[l];
    if (l != last) z = z.cwiseMax(0.0);
    act = std::move(z);
  }
  return act;
}

Tape record_forward(const Mlp& net, const Matrix& inputs) {
  if (static_cast<std::size_t>(inputs.rows()) != net.input_size())
    throw ConfigError("mlp input has " + std::to_string(inputs.rows()) + " features, expected " +
                      std::to_string(net.input_size()));
  Tape tape;
  tape.sizes = net.layer_sizes();
  const std::size_t layers = net.num_layers();
  tape.inputs.reserve(layers);
  tape.pre.reserve(layers);
  tape.inputs.push_back(inputs);
  for (std::size_t l = 0; l < layers; ++l) {
    Matrix z = net.params().weights[l] * tape.inputs.back();
    z.colwise() += net.params().biases[l];
    if (l + 1 < layers) {
      tape.inputs.push_back(z.cwiseMax(0.0));
      tape.pre.push_back(std::move(z));
    } else {
      tape.output = z;
      tape.pre.push_back(std::move(z));
    }
  }
  return tape;
}

Backprop backward(const Mlp& net, const Tape& tape, const Matrix& output_adjoint,
                  bool want_input_grad) {
  if (!tape.recorded()) throw UsageError("backward called without a recorded forward pass");
  if (tape.sizes != net.layer_sizes())
    throw UsageError("tape was recorded on a network with different layer sizes");
  if (output_adjoint.rows() != tape.output.rows() || output_adjoint.cols() != tape.output.cols())
    throw ConfigError("output adjoint shape " + shape_str(output_adjoint.rows(), output_adjoint.cols()) +
                      " != output shape " + shape_str(tape.output.rows(), tape.output.cols()));

  Backprop out;
  out.grads = ParamSet::zeros_like(net.params());
  const std::size_t layers = net.num_layers();
  Matrix delta = output_adjoint;  // dLoss/dpre for the current layer
  for (std::size_t l = layers; l-- > 0;) {
    if (l + 1 < layers) delta = delta.cwiseProduct((tape.pre[l].array() > 0.0).cast<double>().matrix());
    out.grads.weights[l].noalias() = delta * tape.inputs[l].transpose();
    out.grads.biases[l] = delta.rowwise().sum();
    if (l > 0 || want_input_grad) {
      Matrix prev = net.params().weights[l].transpose() * delta;
      delta = std::move(prev);
    }
  }
  if (want_input_grad) out.input_grad = std::move(delta);
  return out;
}

LossGrad mse(const Matrix& pred, const Matrix& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols())
    throw ConfigError("mse shape mismatch");
  LossGrad lg;
  const Matrix diff = pred - target;
  const double n = static_cast<double>(diff.size());
  lg.value = diff.squaredNorm() / n;
  lg.adjoint = (2.0 / n) * diff;
  return lg;
}

void soft_update(ParamSet& target, const ParamSet& source, double tau) {
  if (!target.same_shape(source)) throw ConfigError("soft update between differently shaped nets");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("soft update tau must lie in (0, 1]");
  for (std::size_t l = 0; l < target.weights.size(); ++l) {
    target.weights[l] = tau * source.weights[l] + (1.0 - tau) * target.weights[l];
    target.biases[l] = tau * source.biases[l] + (1.0 - tau) * target.biases[l];
  }
}

}  // namespace aoicache::nn
