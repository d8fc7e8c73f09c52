#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "aoicache/env/environment.hpp"
#include "aoicache/rng.hpp"

namespace aoicache::agents {

/// One transition. States are the stacked per-EN local observations, from
/// which the global critic input is rebuilt losslessly.
struct Experience {
  Eigen::VectorXd state;
  env::JointAction action;
  double reward = 0.0;
  Eigen::VectorXd next_state;
};

/// Fixed-capacity ring; the oldest experience is overwritten first.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::uint64_t seed);

  void push(Experience e);
  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t total_pushed() const { return pushed_; }

  /// Uniform sample of `n` distinct experiences (n <= size()).
  std::vector<const Experience*> sample(std::size_t n);

  /// Stored experiences from oldest to newest.
  std::vector<const Experience*> chronological() const;

 private:
  std::size_t capacity_;
  std::vector<Experience> data_;
  std::size_t next_ = 0;
  std::uint64_t pushed_ = 0;
  Rng rng_;
};

}  // namespace aoicache::agents
