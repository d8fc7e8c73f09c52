#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aoicache/nncore/mlp.hpp"
#include "aoicache/rng.hpp"

namespace aoicache::nn {

/// Contiguous partition of a vector's rows into blocks of the given sizes.
using BlockSizes = std::vector<std::size_t>;

struct SoftmaxResult {
  Matrix probs;
  Matrix log_probs;
};

/// Per-block softmax and log-softmax of each column (max-subtracted).
SoftmaxResult softmax_with_log(const Matrix& logits, std::span<const std::size_t> blocks);

/// Given y = softmax(x) per block and dL/dy, returns dL/dx.
Matrix block_softmax_backward(const Matrix& probs, const Matrix& d_probs,
                              std::span<const std::size_t> blocks);

/// Given log_softmax(x) per block (through its probs) and dL/dlogp, returns dL/dx.
Matrix block_log_softmax_backward(const Matrix& probs, const Matrix& d_log_probs,
                                  std::span<const std::size_t> blocks);

/// Per-block column sums of `m` broadcast back to every row of the block.
Matrix block_sums_broadcast(const Matrix& m, std::span<const std::size_t> blocks);

/// Standard Gumbel(0,1) transform of u in (0,1): -log(-log u).
double gumbel_from_uniform(double u);

/// i.i.d. Gumbel(0,1) samples.
Matrix gumbel_noise(Eigen::Index rows, Eigen::Index cols, Rng& rng);

}  // namespace aoicache::nn
