#include "aoicache/agents/hyper.hpp"

#include "aoicache/errors.hpp"

namespace aoicache::agents {

void Hyper::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("hyper: " + what); };
  if (hidden == 0) fail("hidden must be positive");
  if (!(q_lr > 0) || !(policy_lr > 0) || !(alpha_lr > 0)) fail("learning rates must be positive");
  if (!(lr_power > 0)) fail("lr_power must be positive");
  if (total_steps == 0) fail("total_steps must be positive");
  if (buffer_capacity == 0 || batch_size == 0) fail("buffer and batch sizes must be positive");
  if (batch_size > buffer_capacity) fail("batch_size exceeds buffer_capacity");
  if (!(tau > 0 && tau <= 1)) fail("tau must lie in (0, 1]");
  if (!(gamma >= 0 && gamma < 1)) fail("gamma must lie in [0, 1)");
  if (!(gs_temperature > 0) || !(gs_temperature_final > 0)) fail("GS temperature must be positive");
  if (!(initial_alpha > 0)) fail("initial_alpha must be positive");
  if (!(eps_start >= 0 && eps_start <= 1 && eps_end >= 0 && eps_end <= 1)) fail("epsilon in [0, 1]");
  if (!(eps_fraction > 0 && eps_fraction <= 1)) fail("eps_fraction must lie in (0, 1]");
}

std::string to_string(PolicyEstimator e) {
  return e == PolicyEstimator::exact ? "exact" : "gumbel_softmax";
}

PolicyEstimator policy_estimator_from_string(const std::string& s) {
  if (s == "exact") return PolicyEstimator::exact;
  if (s == "gumbel_softmax" || s == "gs") return PolicyEstimator::gumbel_softmax;
  throw ConfigError("unknown policy estimator '" + s + "'");
}

}  // namespace aoicache::agents
