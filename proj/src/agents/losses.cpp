#include "aoicache/agents/losses.hpp"

#include <cmath>

#include "aoicache/errors.hpp"
#include "aoicache/nncore/ops.hpp"

namespace aoicache::agents {

namespace {

struct CriticEval {
  std::vector<nn::Tape> tapes;
  Eigen::RowVectorXd min_values;
  std::vector<int> argmin;  // which critic attains the min, per column
};

CriticEval evaluate_critics(std::span<const nn::Mlp> critics, const Matrix& inputs) {
  if (critics.empty()) throw ConfigError("at least one critic is required");
  CriticEval ev;
  ev.tapes.reserve(critics.size());
  for (const auto& c : critics) ev.tapes.push_back(nn::record_forward(c, inputs));
  const Eigen::Index n = inputs.cols();
  ev.min_values = ev.tapes[0].output.row(0);
  ev.argmin.assign(static_cast<std::size_t>(n), 0);
  for (std::size_t k = 1; k < critics.size(); ++k)
    for (Eigen::Index j = 0; j < n; ++j)
      if (ev.tapes[k].output(0, j) < ev.min_values[j]) {
        ev.min_values[j] = ev.tapes[k].output(0, j);
        ev.argmin[static_cast<std::size_t>(j)] = static_cast<int>(k);
      }
  return ev;
}

std::vector<nn::Tape> record_heads(const PolicyView& view) {
  if (view.heads.size() != view.inputs.size()) throw ConfigError("one input per policy head required");
  std::vector<nn::Tape> tapes;
  tapes.reserve(view.heads.size());
  for (std::size_t h = 0; h < view.heads.size(); ++h)
    tapes.push_back(nn::record_forward(view.heads[h], view.inputs[h]));
  return tapes;
}

Matrix stack_outputs(const std::vector<nn::Tape>& tapes) {
  Eigen::Index rows = 0;
  for (const auto& t : tapes) rows += t.output.rows();
  Matrix out(rows, tapes.front().output.cols());
  Eigen::Index r = 0;
  for (const auto& t : tapes) {
    out.middleRows(r, t.output.rows()) = t.output;
    r += t.output.rows();
  }
  return out;
}

std::vector<nn::ParamSet> backprop_heads(const PolicyView& view, const std::vector<nn::Tape>& tapes,
                                         const Matrix& d_logits) {
  std::vector<nn::ParamSet> grads;
  grads.reserve(tapes.size());
  Eigen::Index r = 0;
  for (std::size_t h = 0; h < tapes.size(); ++h) {
    const Eigen::Index rows = tapes[h].output.rows();
    grads.push_back(nn::backward(view.heads[h], tapes[h], d_logits.middleRows(r, rows)).grads);
    r += rows;
  }
  return grads;
}

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DivergenceError(std::string(what) + " is not finite");
}

}  // namespace

Batch make_batch(std::span<const Experience* const> experiences, const env::NetworkConfig& cfg) {
  if (experiences.empty()) throw UsageError("empty mini-batch");
  const auto n = static_cast<Eigen::Index>(experiences.size());
  const Eigen::Index stacked_rows = experiences.front()->state.size();
  const int local = cfg.local_actions();
  Batch b;
  b.stacked.resize(stacked_rows, n);
  b.next_stacked.resize(stacked_rows, n);
  b.global.resize(env::global_obs_size(cfg), n);
  b.next_global.resize(env::global_obs_size(cfg), n);
  b.actions.resize(static_cast<Eigen::Index>(cfg.num_ens) * local, n);
  b.rewards.resize(n);
  b.joint_actions.reserve(experiences.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    const Experience& e = *experiences[static_cast<std::size_t>(j)];
    b.stacked.col(j) = e.state;
    b.next_stacked.col(j) = e.next_state;
    b.global.col(j) = env::global_from_stacked(e.state, cfg);
    b.next_global.col(j) = env::global_from_stacked(e.next_state, cfg);
    b.actions.col(j) = one_hot_blocks(e.action, local);
    b.rewards[j] = e.reward;
    b.joint_actions.push_back(e.action);
  }
  return b;
}

Matrix row_block(const Matrix& m, Eigen::Index first, Eigen::Index count) {
  return m.middleRows(first, count);
}

Matrix critic_input(const Matrix& state_features, const Matrix& action_encoding) {
  if (state_features.cols() != action_encoding.cols()) throw ConfigError("critic input batch mismatch");
  Matrix in(state_features.rows() + action_encoding.rows(), state_features.cols());
  in.topRows(state_features.rows()) = state_features;
  in.bottomRows(action_encoding.rows()) = action_encoding;
  return in;
}

Matrix policy_logits(const PolicyView& view) {
  if (view.heads.size() != view.inputs.size()) throw ConfigError("one input per policy head required");
  std::vector<Matrix> outs;
  Eigen::Index rows = 0;
  for (std::size_t h = 0; h < view.heads.size(); ++h) {
    outs.push_back(view.heads[h].forward(view.inputs[h]));
    rows += outs.back().rows();
  }
  Matrix logits(rows, outs.front().cols());
  Eigen::Index r = 0;
  for (auto& o : outs) {
    logits.middleRows(r, o.rows()) = o;
    r += o.rows();
  }
  return logits;
}

CriticLoss critic_loss(const nn::Mlp& critic, const Matrix& inputs, const Eigen::RowVectorXd& targets) {
  const nn::Tape tape = nn::record_forward(critic, inputs);
  const nn::LossGrad lg = nn::mse(tape.output, targets);
  check_finite(lg.value, "critic loss");
  CriticLoss out;
  out.value = lg.value;
  out.predictions = tape.output.row(0);
  out.grads = nn::backward(critic, tape, lg.adjoint).grads;
  return out;
}

Eigen::RowVectorXd soft_q_targets(const PolicyView& next_policy, std::span<const nn::Mlp> target_critics,
                                  const Matrix& next_global, const Eigen::RowVectorXd& rewards,
                                  const Matrix& noise, double gamma, double alpha, double c0,
                                  std::span<const std::size_t> blocks) {
  const auto sm = nn::softmax_with_log(policy_logits(next_policy), blocks);
  const GsSample z = gs_relax(sm.log_probs, noise, c0, blocks);
  const CriticEval ev = evaluate_critics(target_critics, critic_input(next_global, z.relaxed));
  const Eigen::RowVectorXd soft_value = ev.min_values - alpha * relaxed_log_prob(z.relaxed, sm.log_probs);
  return rewards + gamma * soft_value;
}

PolicyLoss policy_loss_gs(const PolicyView& policy, std::span<const nn::Mlp> critics,
                          const Matrix& global, const Matrix& noise, double alpha, double c0,
                          std::span<const std::size_t> blocks) {
  const std::vector<nn::Tape> tapes = record_heads(policy);
  const auto sm = nn::softmax_with_log(stack_outputs(tapes), blocks);
  const GsSample z = gs_relax(sm.log_probs, noise, c0, blocks);
  const Matrix q_in = critic_input(global, z.relaxed);
  const CriticEval ev = evaluate_critics(critics, q_in);

  const Eigen::Index n = global.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  PolicyLoss out;
  out.log_pi = relaxed_log_prob(z.relaxed, sm.log_probs);
  out.value = (alpha * out.log_pi - ev.min_values).sum() * inv_n;
  check_finite(out.value, "policy loss");
  out.relaxed = z.relaxed;

  // d/dz of -min_k Q_k(s, z), routed through whichever critic attains the min.
  const Eigen::Index action_rows = z.relaxed.rows();
  Matrix d_relaxed = Matrix::Zero(action_rows, n);
  for (std::size_t k = 0; k < critics.size(); ++k) {
    Matrix adj = Matrix::Zero(1, n);
    bool used = false;
    for (Eigen::Index j = 0; j < n; ++j)
      if (ev.argmin[static_cast<std::size_t>(j)] == static_cast<int>(k)) {
        adj(0, j) = -inv_n;
        used = true;
      }
    if (!used) continue;
    const nn::Backprop bp = nn::backward(critics[k], ev.tapes[k], adj, true);
    d_relaxed += bp.input_grad.bottomRows(action_rows);
  }
  // log pi(z) = <z, log mu>: contributes alpha * log mu to dz and alpha * z to dlog mu.
  d_relaxed += (alpha * inv_n) * sm.log_probs;
  Matrix d_log_probs = (alpha * inv_n) * z.relaxed;
  d_log_probs += nn::block_softmax_backward(z.relaxed, d_relaxed, blocks) / c0;

  const Matrix d_logits = nn::block_log_softmax_backward(sm.probs, d_log_probs, blocks);
  out.head_grads = backprop_heads(policy, tapes, d_logits);
  return out;
}

PolicyLoss policy_loss_exact(const PolicyView& policy, std::span<const nn::Mlp> critics,
                             const Matrix& global, double alpha, std::span<const std::size_t> blocks) {
  const std::vector<nn::Tape> tapes = record_heads(policy);
  const auto sm = nn::softmax_with_log(stack_outputs(tapes), blocks);
  const Eigen::Index n = global.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  const int num_blocks = static_cast<int>(blocks.size());
  const int local = static_cast<int>(blocks.front());
  for (auto bs : blocks)
    if (static_cast<int>(bs) != local) throw ConfigError("exact estimator needs equal-size blocks");
  std::size_t count = 1;
  for (int b = 0; b < num_blocks; ++b) count *= static_cast<std::size_t>(local);

  Matrix encodings(sm.probs.rows(), static_cast<Eigen::Index>(count));
  std::vector<env::JointAction> actions(count);
  for (std::size_t a = 0; a < count; ++a) {
    actions[a] = joint_from_index(a, num_blocks, local);
    encodings.col(static_cast<Eigen::Index>(a)) = one_hot_blocks(actions[a], local);
  }

  PolicyLoss out;
  out.log_pi.resize(n);
  Matrix d_log_probs = Matrix::Zero(sm.probs.rows(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Matrix states = global.col(j).replicate(1, static_cast<Eigen::Index>(count));
    const CriticEval ev = evaluate_critics(critics, critic_input(states, encodings));
    const Vector logp = sm.log_probs.col(j);
    double expected_log_pi = 0.0;
    for (std::size_t a = 0; a < count; ++a) {
      const double lp = joint_log_prob(logp, actions[a], blocks);
      const double pa = std::exp(lp);
      const double q = ev.min_values[static_cast<Eigen::Index>(a)];
      out.value += pa * (alpha * lp - q) * inv_n;
      expected_log_pi += pa * lp;
      // d/dlogp of sum_a pi(a) (alpha log pi(a) - Q(a)) = pi(a)(alpha log pi(a) + alpha - Q(a)).
      const double w = pa * (alpha * lp + alpha - q) * inv_n;
      for (int b = 0; b < num_blocks; ++b) d_log_probs(b * local + actions[a][b], j) += w;
    }
    out.log_pi[j] = expected_log_pi;
  }
  check_finite(out.value, "policy loss");
  const Matrix d_logits = nn::block_log_softmax_backward(sm.probs, d_log_probs, blocks);
  out.head_grads = backprop_heads(policy, tapes, d_logits);
  return out;
}

TemperatureLoss temperature_loss(double log_alpha, const Eigen::RowVectorXd& log_pi, double target_entropy) {
  const double alpha = std::exp(log_alpha);
  const double mean_term = (log_pi.array() + target_entropy).mean();
  return {-alpha * mean_term, -alpha * mean_term};
}

}  // namespace aoicache::agents
