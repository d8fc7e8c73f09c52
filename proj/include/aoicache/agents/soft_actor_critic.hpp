#pragma once

#include <vector>

#include "aoicache/agents/learner.hpp"
#include "aoicache/nncore/optim.hpp"

namespace aoicache::agents {

enum class PolicyLayout {
  centralized,    // one network: global features -> B(F+1) logits
  decentralized,  // B networks: local observation b -> F+1 logits
};

struct SacVariant {
  PolicyLayout layout = PolicyLayout::centralized;
  bool twin_critics = true;    // clipped double Q
  bool entropy_bonus = true;   // learn alpha; false fixes alpha = 0
};

/// Multi-agent discrete soft actor-critic over a factorized policy, sampled
/// through the Gumbel-Softmax relaxation. With a single critic and no
/// entropy bonus it is the GS actor-critic baseline.
class SoftActorCritic : public Learner {
 public:
  SoftActorCritic(const env::NetworkConfig& cfg, const Hyper& hyper, SacVariant variant,
                  std::uint64_t seed);

  Algorithm algorithm() const override;
  std::unique_ptr<Learner> clone() const override;
  env::JointAction act(const Eigen::VectorXd& stacked_obs, bool explore) override;
  UpdateStats update(const Batch& batch) override;
  double alpha() const override;
  void reseed(std::uint64_t seed) override { rng_ = Rng(derive_seed(seed, 0x5ac)); }
  std::uint64_t updates() const override { return updates_; }
  nlohmann::json to_json() const override;
  void load_json(const nlohmann::json& j);

  // Individual stages of one update, in the order update() runs them.
  Eigen::RowVectorXd compute_targets(const Batch& batch);
  double update_critics(const Batch& batch, const Eigen::RowVectorXd& targets);
  PolicyLoss update_policy(const Batch& batch);
  double update_temperature(const Eigen::RowVectorXd& log_pi);
  void soft_copy_targets();

  /// Policy view over a batch of stacked local observations.
  PolicyView policy_view(const Matrix& stacked, const Matrix& global) const;
  /// Per-block probabilities for one observation.
  Vector action_probs(const Eigen::VectorXd& stacked_obs) const;

  const SacVariant& variant() const { return variant_; }
  const BlockSizes& blocks() const { return blocks_; }
  std::vector<nn::Mlp>& critics() { return critics_; }
  std::vector<nn::Mlp>& target_critics() { return target_critics_; }
  std::vector<nn::Mlp>& policy_heads() { return heads_; }
  const std::vector<nn::Mlp>& policy_heads() const { return heads_; }
  double log_alpha() const { return log_alpha_; }
  void set_log_alpha(double v) { log_alpha_ = v; }
  double target_entropy() const { return target_entropy_; }
  void set_target_entropy(double h) { target_entropy_ = h; }
  double gs_temperature() const;
  Rng& rng() { return rng_; }

 private:
  env::NetworkConfig cfg_;
  Hyper hyper_;
  SacVariant variant_;
  BlockSizes blocks_;

  std::vector<nn::Mlp> critics_;
  std::vector<nn::Mlp> target_critics_;
  std::vector<nn::AdamState> critic_opt_;
  std::vector<nn::Mlp> heads_;
  std::vector<nn::AdamState> head_opt_;
  double log_alpha_ = 0.0;
  nn::ScalarAdam alpha_opt_;
  double target_entropy_ = 0.0;

  nn::LrSchedule q_schedule_;
  nn::LrSchedule policy_schedule_;
  nn::LrSchedule alpha_schedule_;
  std::uint64_t updates_ = 0;
  Rng rng_;
};

}  // namespace aoicache::agents
