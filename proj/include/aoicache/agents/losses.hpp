#pragma once

#include <span>
#include <vector>

#include "aoicache/agents/replay_buffer.hpp"
#include "aoicache/agents/sampling.hpp"
#include "aoicache/env/config.hpp"
#include "aoicache/nncore/mlp.hpp"

namespace aoicache::agents {

/// Column-stacked mini-batch.
struct Batch {
  Matrix stacked;       // per-EN local observations, B*2BF rows
  Matrix global;        // global features
  Matrix actions;       // one-hot blocks, B(F+1) rows
  std::vector<env::JointAction> joint_actions;
  Eigen::RowVectorXd rewards;
  Matrix next_stacked;
  Matrix next_global;

  Eigen::Index size() const { return rewards.size(); }
};

Batch make_batch(std::span<const Experience* const> experiences, const env::NetworkConfig& cfg);

/// Rows [first, first+count) of every column; decentralized heads read their
/// own local observation block this way.
Matrix row_block(const Matrix& m, Eigen::Index first, Eigen::Index count);

/// Critic input: state features stacked over the action encoding.
Matrix critic_input(const Matrix& state_features, const Matrix& action_encoding);

/// Policy network(s) plus the input each one reads. Head outputs are
/// stacked in order to form the B(F+1) logit vector.
struct PolicyView {
  std::span<const nn::Mlp> heads;
  std::vector<Matrix> inputs;
};

Matrix policy_logits(const PolicyView& view);

struct CriticLoss {
  double value = 0.0;
  nn::ParamSet grads;
  Eigen::RowVectorXd predictions;
};

/// mean_xi (Q(s, a) - y)^2 and its parameter gradient.
CriticLoss critic_loss(const nn::Mlp& critic, const Matrix& inputs, const Eigen::RowVectorXd& targets);

/// y = r + gamma * (min_k Q_k(s', z') - alpha * log pi(z'|s')), with z' the
/// relaxed sample built from `noise`. A single critic gives the plain
/// (non-clipped) target; alpha = 0 drops the entropy bonus.
Eigen::RowVectorXd soft_q_targets(const PolicyView& next_policy, std::span<const nn::Mlp> target_critics,
                                  const Matrix& next_global, const Eigen::RowVectorXd& rewards,
                                  const Matrix& noise, double gamma, double alpha, double c0,
                                  std::span<const std::size_t> blocks);

struct PolicyLoss {
  double value = 0.0;
  std::vector<nn::ParamSet> head_grads;
  Eigen::RowVectorXd log_pi;  // per-sample log pi used by the temperature loss
  Matrix relaxed;             // the relaxed actions (empty for the exact estimator)
};

/// mean_xi [alpha * log pi(z|s) - min_k Q_k(s, z)] with z = GS(pi(.|s)) built
/// from `noise`; gradients flow through z into every policy head.
PolicyLoss policy_loss_gs(const PolicyView& policy, std::span<const nn::Mlp> critics,
                          const Matrix& global, const Matrix& noise, double alpha, double c0,
                          std::span<const std::size_t> blocks);

/// Same objective with the inner expectation over actions computed exactly
/// by enumerating every joint action (critics read one-hot actions).
PolicyLoss policy_loss_exact(const PolicyView& policy, std::span<const nn::Mlp> critics,
                             const Matrix& global, double alpha, std::span<const std::size_t> blocks);

struct TemperatureLoss {
  double value = 0.0;
  double grad_log_alpha = 0.0;
};

/// J = -alpha * mean(log pi + H_target), differentiated w.r.t. log alpha.
/// alpha rises when the policy entropy -log pi drops below H_target.
TemperatureLoss temperature_loss(double log_alpha, const Eigen::RowVectorXd& log_pi, double target_entropy);

}  // namespace aoicache::agents
