#pragma once

#include <cstdint>
#include <string>

namespace aoicache::agents {

enum class PolicyEstimator {
  gumbel_softmax,  // one relaxed sample per batch element
  exact,           // enumerate the joint action space (small problems only)
};

/// Learning hyperparameters. Network/optimizer defaults follow the
/// reference implementation table; the rest are documented choices.
struct Hyper {
  std::size_t hidden = 128;
  double q_lr = 0.01;
  double policy_lr = 0.001;
  double alpha_lr = 0.001;
  double lr_power = 0.9;
  double lr_floor = 1e-5;
  std::uint64_t total_steps = 20000;  // horizon of the polynomial decay
  std::size_t buffer_capacity = 5000;
  std::size_t batch_size = 100;
  double tau = 0.001;
  double gamma = 0.99;

  double gs_temperature = 1.0;        // c0
  double gs_temperature_final = 1.0;  // exponential annealing target
  double target_entropy_scale = 0.6;  // H = scale * B * ln(F+1)
  double initial_alpha = 0.2;
  PolicyEstimator policy_estimator = PolicyEstimator::gumbel_softmax;

  double eps_start = 1.0;
  double eps_end = 0.05;
  double eps_fraction = 0.2;
  std::uint64_t dqn_action_cap = 5000;

  void validate() const;
};

std::string to_string(PolicyEstimator e);
PolicyEstimator policy_estimator_from_string(const std::string& s);

}  // namespace aoicache::agents
