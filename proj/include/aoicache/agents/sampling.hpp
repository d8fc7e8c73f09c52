#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "aoicache/env/environment.hpp"
#include "aoicache/nncore/ops.hpp"
#include "aoicache/rng.hpp"

namespace aoicache::agents {

using nn::BlockSizes;
using nn::Matrix;
using nn::Vector;

/// log(p) with zero probabilities mapped to -1e9.
double floored_log(double p);

/// Hard joint action via the Gumbel-Max trick: per block,
/// argmax_i [g_i + log p_i]. Distributed exactly as the factorized
/// categorical given by `probs`.
env::JointAction gumbel_max_sample(const Vector& probs, std::span<const std::size_t> blocks, Rng& rng);

/// Relaxed (Gumbel-Softmax) joint action for a batch.
struct GsSample {
  Matrix relaxed;          // per-block simplex vectors, one column per sample
  Eigen::MatrixXi hard;    // per-block argmax, (num blocks) x batch
  Matrix noise;            // the Gumbel draws used
  double temperature = 1.0;
};

/// z = softmax((log_probs + noise) / c0) per block, deterministic in `noise`.
GsSample gs_relax(const Matrix& log_probs, const Matrix& noise, double c0,
                  std::span<const std::size_t> blocks);

/// Draws fresh Gumbel noise and relaxes. Throws ConfigError unless c0 > 0.
GsSample gs_sample(const Matrix& log_probs, double c0, std::span<const std::size_t> blocks, Rng& rng);

/// log pi at a relaxed sample: sum over blocks of <z_b, log mu_b>, per column.
Eigen::RowVectorXd relaxed_log_prob(const Matrix& relaxed, const Matrix& log_probs);

/// Exact log-probability of a hard joint action under block log-probs.
double joint_log_prob(const Vector& log_probs, const env::JointAction& action,
                      std::span<const std::size_t> blocks);

/// Per-block entropies summed.
double total_entropy(const Vector& probs, std::span<const std::size_t> blocks);

/// Concatenated one-hot blocks of length F+1 each.
Vector one_hot_blocks(const env::JointAction& action, int local_actions);

/// Mixed-radix joint index sum_b a_b (F+1)^b and its inverse.
std::size_t joint_index(const env::JointAction& action, int local_actions);
env::JointAction joint_from_index(std::size_t index, int num_ens, int local_actions);

}  // namespace aoicache::agents
