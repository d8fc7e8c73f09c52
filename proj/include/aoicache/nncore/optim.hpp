#pragma once

#include <cstdint>
#include <span>

#include "aoicache/nncore/mlp.hpp"

namespace aoicache::nn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam moments for one parameter set.
struct AdamState {
  AdamConfig config;
  ParamSet first_moment;
  ParamSet second_moment;
  std::uint64_t step_count = 0;

  AdamState() = default;
  explicit AdamState(const ParamSet& like, AdamConfig cfg = {});
};

/// One bias-corrected Adam update. Throws DivergenceError if any gradient
/// entry is non-finite; params and state are untouched in that case.
void adam_step(ParamSet& params, const ParamSet& grads, AdamState& state, double rate);

/// Adam on a single scalar (used for the log-temperature).
struct ScalarAdam {
  AdamConfig config;
  double first_moment = 0.0;
  double second_moment = 0.0;
  std::uint64_t step_count = 0;

  void step(double& param, double grad, double rate);
};

/// Polynomial decay: initial * (1 - t/total)^power, never below `floor`
/// (the floor itself is capped at the initial rate).
class LrSchedule {
 public:
  LrSchedule() = default;
  LrSchedule(double initial_rate, std::uint64_t total_steps, double power = 0.9,
             double floor = 1e-5);

  double rate(std::uint64_t t) const;
  double initial_rate() const { return initial_; }
  double power() const { return power_; }
  std::uint64_t total_steps() const { return total_; }

 private:
  double initial_ = 1e-3;
  std::uint64_t total_ = 1;
  double power_ = 0.9;
  double floor_ = 1e-5;
};

}  // namespace aoicache::nn
