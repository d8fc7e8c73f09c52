#include "aoicache/agents/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aoicache/errors.hpp"

namespace aoicache::agents {

double floored_log(double p) { return p > 0.0 ? std::max(std::log(p), -1e9) : -1e9; }

env::JointAction gumbel_max_sample(const Vector& probs, std::span<const std::size_t> blocks, Rng& rng) {
  env::JointAction action;
  action.reserve(blocks.size());
  Eigen::Index start = 0;
  for (auto bs : blocks) {
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < bs; ++i) {
      const double score = floored_log(probs[start + static_cast<Eigen::Index>(i)]) +
                           nn::gumbel_from_uniform(open_uniform(rng));
      if (score > best_score) {
        best_score = score;
        best = static_cast<int>(i);
      }
    }
    action.push_back(best);
    start += static_cast<Eigen::Index>(bs);
  }
  return action;
}

GsSample gs_relax(const Matrix& log_probs, const Matrix& noise, double c0,
                  std::span<const std::size_t> blocks) {
  if (!(c0 > 0.0)) throw ConfigError("Gumbel-Softmax temperature must be positive");
  GsSample s;
  s.temperature = c0;
  s.noise = noise;
  const Matrix scaled = (log_probs + noise) / c0;
  s.relaxed = nn::softmax_with_log(scaled, blocks).probs;
  s.hard.resize(static_cast<Eigen::Index>(blocks.size()), log_probs.cols());
  Eigen::Index start = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto n = static_cast<Eigen::Index>(blocks[b]);
    for (Eigen::Index c = 0; c < log_probs.cols(); ++c) {
      Eigen::Index arg = 0;
      s.relaxed.col(c).segment(start, n).maxCoeff(&arg);
      s.hard(static_cast<Eigen::Index>(b), c) = static_cast<int>(arg);
    }
    start += n;
  }
  return s;
}

GsSample gs_sample(const Matrix& log_probs, double c0, std::span<const std::size_t> blocks, Rng& rng) {
  return gs_relax(log_probs, nn::gumbel_noise(log_probs.rows(), log_probs.cols(), rng), c0, blocks);
}

Eigen::RowVectorXd relaxed_log_prob(const Matrix& relaxed, const Matrix& log_probs) {
  return relaxed.cwiseProduct(log_probs).colwise().sum();
}

double joint_log_prob(const Vector& log_probs, const env::JointAction& action,
                      std::span<const std::size_t> blocks) {
  double total = 0.0;
  Eigen::Index start = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    total += log_probs[start + action[b]];
    start += static_cast<Eigen::Index>(blocks[b]);
  }
  return total;
}

double total_entropy(const Vector& probs, std::span<const std::size_t> blocks) {
  double h = 0.0;
  Eigen::Index start = 0;
  for (auto bs : blocks) {
    for (std::size_t i = 0; i < bs; ++i) {
      const double p = probs[start + static_cast<Eigen::Index>(i)];
      if (p > 0.0) h -= p * std::log(p);
    }
    start += static_cast<Eigen::Index>(bs);
  }
  return h;
}

Vector one_hot_blocks(const env::JointAction& action, int local_actions) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(action.size()) * local_actions);
  for (std::size_t b = 0; b < action.size(); ++b)
    v[static_cast<Eigen::Index>(b) * local_actions + action[b]] = 1.0;
  return v;
}

std::size_t joint_index(const env::JointAction& action, int local_actions) {
  std::size_t idx = 0;
  for (std::size_t b = action.size(); b-- > 0;)
    idx = idx * static_cast<std::size_t>(local_actions) + static_cast<std::size_t>(action[b]);
  return idx;
}

env::JointAction joint_from_index(std::size_t index, int num_ens, int local_actions) {
  env::JointAction a(num_ens);
  for (int b = 0; b < num_ens; ++b) {
    a[b] = static_cast<int>(index % static_cast<std::size_t>(local_actions));
    index /= static_cast<std::size_t>(local_actions);
  }
  return a;
}

}  // namespace aoicache::agents
