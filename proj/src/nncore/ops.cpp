#include "aoicache/nncore/ops.hpp"

#include <cmath>
#include <numeric>

#include "aoicache/errors.hpp"

namespace aoicache::nn {

namespace {

void check_blocks(Eigen::Index rows, std::span<const std::size_t> blocks) {
  std::size_t total = 0;
  for (auto b : blocks) {
    if (b == 0) throw ConfigError("softmax block must be non-empty");
    total += b;
  }
  if (static_cast<Eigen::Index>(total) != rows)
    throw ConfigError("softmax blocks cover " + std::to_string(total) + " rows, input has " +
                      std::to_string(rows));
}

}  // namespace

SoftmaxResult softmax_with_log(const Matrix& logits, std::span<const std::size_t> blocks) {
  check_blocks(logits.rows(), blocks);
  SoftmaxResult r{Matrix(logits.rows(), logits.cols()), Matrix(logits.rows(), logits.cols())};
  Eigen::Index start = 0;
  for (auto bs : blocks) {
    const auto n = static_cast<Eigen::Index>(bs);
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
      auto x = logits.col(c).segment(start, n);
      const double mx = x.maxCoeff();
      const Vector shifted = x.array() - mx;
      const double lse = std::log(shifted.array().exp().sum());
      r.log_probs.col(c).segment(start, n) = shifted.array() - lse;
      r.probs.col(c).segment(start, n) = r.log_probs.col(c).segment(start, n).array().exp();
    }
    start += n;
  }
  return r;
}

Matrix block_sums_broadcast(const Matrix& m, std::span<const std::size_t> blocks) {
  check_blocks(m.rows(), blocks);
  Matrix out(m.rows(), m.cols());
  Eigen::Index start = 0;
  for (auto bs : blocks) {
    const auto n = static_cast<Eigen::Index>(bs);
    const Eigen::RowVectorXd sums = m.middleRows(start, n).colwise().sum();
    out.middleRows(start, n) = sums.replicate(n, 1);
    start += n;
  }
  return out;
}

Matrix block_softmax_backward(const Matrix& probs, const Matrix& d_probs,
                              std::span<const std::size_t> blocks) {
  const Matrix weighted = probs.cwiseProduct(d_probs);
  return weighted - probs.cwiseProduct(block_sums_broadcast(weighted, blocks));
}

Matrix block_log_softmax_backward(const Matrix& probs, const Matrix& d_log_probs,
                                  std::span<const std::size_t> blocks) {
  return d_log_probs - probs.cwiseProduct(block_sums_broadcast(d_log_probs, blocks));
}

double gumbel_from_uniform(double u) { return -std::log(-std::log(u)); }

Matrix gumbel_noise(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix g(rows, cols);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = gumbel_from_uniform(open_uniform(rng));
  return g;
}

}  // namespace aoicache::nn
