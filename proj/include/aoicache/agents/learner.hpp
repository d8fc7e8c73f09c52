#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>

#include <json.hpp>

#include "aoicache/agents/hyper.hpp"
#include "aoicache/agents/losses.hpp"
#include "aoicache/env/environment.hpp"

namespace aoicache::agents {

enum class Algorithm { madsac_cc, madsac_dc, dqn, ac, random, age_optimal };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

struct UpdateStats {
  double loss_q = std::numeric_limits<double>::quiet_NaN();
  double loss_pi = std::numeric_limits<double>::quiet_NaN();
  double loss_alpha = std::numeric_limits<double>::quiet_NaN();
  double q_lr = std::numeric_limits<double>::quiet_NaN();
  double policy_lr = std::numeric_limits<double>::quiet_NaN();
};

/// Common surface of every caching policy: act on the stacked local
/// observations, learn from replayed mini-batches, serialize.
class Learner {
 public:
  virtual ~Learner() = default;

  virtual Algorithm algorithm() const = 0;
  virtual std::unique_ptr<Learner> clone() const = 0;

  /// `explore` selects the behaviour policy (training) over the execution
  /// policy (evaluation).
  virtual env::JointAction act(const Eigen::VectorXd& stacked_obs, bool explore) = 0;

  virtual bool learns() const { return true; }
  virtual UpdateStats update(const Batch& batch) = 0;

  /// Restarts the action-sampling stream (evaluation runs are seeded
  /// independently of training history).
  virtual void reseed(std::uint64_t seed) = 0;

  virtual double alpha() const { return 0.0; }
  virtual std::uint64_t updates() const = 0;

  virtual nlohmann::json to_json() const = 0;
};

/// Builds a fresh learner. age_optimal maps to a centralized soft
/// actor-critic; the caller is responsible for zeroing the cost weights.
std::unique_ptr<Learner> make_learner(Algorithm algo, const env::NetworkConfig& cfg, const Hyper& hyper,
                                      std::uint64_t seed);

/// Restores a learner from a checkpoint; throws ConfigError if it does not
/// fit the scenario.
std::unique_ptr<Learner> load_learner(const nlohmann::json& checkpoint, const env::NetworkConfig& cfg,
                                      const Hyper& hyper, std::uint64_t seed);

}  // namespace aoicache::agents
