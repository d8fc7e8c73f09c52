#pragma once

#include "aoicache/agents/learner.hpp"
#include "aoicache/nncore/optim.hpp"

namespace aoicache::agents {

/// Deep Q-network over the enumerated joint action space (one output per
/// joint action), epsilon-greedy behaviour, soft-copied target network.
class DqnLearner : public Learner {
 public:
  /// Throws IntractableError when (F+1)^B exceeds hyper.dqn_action_cap.
  DqnLearner(const env::NetworkConfig& cfg, const Hyper& hyper, std::uint64_t seed);

  Algorithm algorithm() const override { return Algorithm::dqn; }
  std::unique_ptr<Learner> clone() const override { return std::make_unique<DqnLearner>(*this); }
  env::JointAction act(const Eigen::VectorXd& stacked_obs, bool explore) override;
  UpdateStats update(const Batch& batch) override;
  void reseed(std::uint64_t seed) override { rng_ = Rng(derive_seed(seed, 0xd09)); }
  std::uint64_t updates() const override { return updates_; }
  nlohmann::json to_json() const override;
  void load_json(const nlohmann::json& j);

  double epsilon() const;
  std::size_t num_joint_actions() const { return num_actions_; }
  nn::Mlp& q_network() { return q_; }
  nn::Mlp& target_network() { return q_target_; }

 private:
  env::NetworkConfig cfg_;
  Hyper hyper_;
  std::size_t num_actions_ = 0;
  nn::Mlp q_;
  nn::Mlp q_target_;
  nn::AdamState opt_;
  nn::LrSchedule schedule_;
  std::uint64_t updates_ = 0;
  std::uint64_t acts_ = 0;
  Rng rng_;
};

/// Updates one uniformly chosen sensor at every EN each epoch.
class RandomLearner : public Learner {
 public:
  RandomLearner(const env::NetworkConfig& cfg, std::uint64_t seed);

  Algorithm algorithm() const override { return Algorithm::random; }
  std::unique_ptr<Learner> clone() const override { return std::make_unique<RandomLearner>(*this); }
  env::JointAction act(const Eigen::VectorXd& stacked_obs, bool explore) override;
  bool learns() const override { return false; }
  UpdateStats update(const Batch&) override { return {}; }
  void reseed(std::uint64_t seed) override { rng_ = Rng(derive_seed(seed, 0x7a9d)); }
  std::uint64_t updates() const override { return 0; }
  nlohmann::json to_json() const override;

 private:
  env::NetworkConfig cfg_;
  Rng rng_;
};

/// Expected per-epoch energy of RandomLearner: sum over ENs of the mean
/// average energy of that EN's sensors.
double random_policy_expected_energy(const env::ChannelRealization& channel, const env::NetworkConfig& cfg);

}  // namespace aoicache::agents
