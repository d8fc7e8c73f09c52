#include "aoicache/nncore/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "aoicache/errors.hpp"

namespace aoicache::nn {

namespace {

struct Corrections {
  double c1;
  double c2;
};

Corrections bias_corrections(const AdamConfig& cfg, std::uint64_t t) {
  const double td = static_cast<double>(t);
  return {1.0 - std::pow(cfg.beta1, td), 1.0 - std::pow(cfg.beta2, td)};
}

// Moments of parameters whose gradient stays zero (dead ReLU units) decay
// geometrically into the subnormal range, where every arithmetic op is two
// orders of magnitude slower. Such values cannot move a parameter, so they
// are flushed to zero.
inline double flush_subnormal(double x) { return std::abs(x) < std::numeric_limits<double>::min() ? 0.0 : x; }

inline void adam_scalar(double& p, double g, double& m, double& v, const AdamConfig& cfg,
                        Corrections c, double rate) {
  m = flush_subnormal(cfg.beta1 * m + (1.0 - cfg.beta1) * g);
  v = flush_subnormal(cfg.beta2 * v + (1.0 - cfg.beta2) * g * g);
  const double m_hat = m / c.c1;
  const double v_hat = v / c.c2;
  p -= rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
}

}  // namespace

AdamState::AdamState(const ParamSet& like, AdamConfig cfg)
    : config(cfg),
      first_moment(ParamSet::zeros_like(like)),
      second_moment(ParamSet::zeros_like(like)) {}

void adam_step(ParamSet& params, const ParamSet& grads, AdamState& state, double rate) {
  if (!params.same_shape(grads) || !params.same_shape(state.first_moment) ||
      !params.same_shape(state.second_moment))
    throw ConfigError("adam_step: parameter, gradient and moment shapes disagree");
  if (!grads.all_finite()) {
    throw DivergenceError("adam_step: non-finite gradient at optimizer step " +
                          std::to_string(state.step_count + 1) + " (" +
                          std::to_string(grads.parameter_count()) + " parameters)");
  }
  ++state.step_count;
  const Corrections c = bias_corrections(state.config, state.step_count);
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    auto update = [&](auto& p, const auto& g, auto& m, auto& v) {
      for (Eigen::Index i = 0; i < p.size(); ++i)
        adam_scalar(p.data()[i], g.data()[i], m.data()[i], v.data()[i], state.config, c, rate);
    };
    update(params.weights[l], grads.weights[l], state.first_moment.weights[l],
           state.second_moment.weights[l]);
    update(params.biases[l], grads.biases[l], state.first_moment.biases[l],
           state.second_moment.biases[l]);
  }
}

void ScalarAdam::step(double& param, double grad, double rate) {
  if (!std::isfinite(grad)) throw DivergenceError("scalar adam: non-finite gradient");
  ++step_count;
  adam_scalar(param, grad, first_moment, second_moment, config, bias_corrections(config, step_count),
              rate);
}

LrSchedule::LrSchedule(double initial_rate, std::uint64_t total_steps, double power, double floor)
    : initial_(initial_rate), total_(total_steps), power_(power), floor_(std::min(floor, initial_rate)) {
  if (!(initial_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (total_steps == 0) throw ConfigError("learning-rate schedule needs total_steps > 0");
  if (!(power > 0.0)) throw ConfigError("learning-rate power must be positive");
}

double LrSchedule::rate(std::uint64_t t) const {
  if (t == 0) return initial_;
  if (t >= total_) return floor_;
  const double frac = 1.0 - static_cast<double>(t) / static_cast<double>(total_);
  return std::max(initial_ * std::pow(frac, power_), floor_);
}

}  // namespace aoicache::nn
