#include "aoicache/agents/replay_buffer.hpp"

#include <algorithm>
#include <numeric>

#include "aoicache/errors.hpp"

namespace aoicache::agents {

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::uint64_t seed) : capacity_(capacity), rng_(seed) {
  if (capacity == 0) throw ConfigError("replay buffer capacity must be positive");
  data_.reserve(capacity);
}

void ReplayBuffer::push(Experience e) {
  if (data_.size() < capacity_) {
    data_.push_back(std::move(e));
  } else {
    data_[next_] = std::move(e);
  }
  next_ = (next_ + 1) % capacity_;
  ++pushed_;
}

std::vector<const Experience*> ReplayBuffer::sample(std::size_t n) {
  if (n > data_.size())
    throw UsageError("cannot sample " + std::to_string(n) + " experiences from a buffer of " +
                     std::to_string(data_.size()));
  // Partial Fisher-Yates over indices: uniform, without replacement.
  std::vector<std::size_t> idx(data_.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<const Experience*> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng_)]);
    out.push_back(&data_[idx[i]]);
  }
  return out;
}

std::vector<const Experience*> ReplayBuffer::chronological() const {
  std::vector<const Experience*> out;
  out.reserve(data_.size());
  const std::size_t start = data_.size() < capacity_ ? 0 : next_;
  for (std::size_t i = 0; i < data_.size(); ++i) out.push_back(&data_[(start + i) % data_.size()]);
  return out;
}

}  // namespace aoicache::agents
