#pragma once

#include <vector>

#include <Eigen/Core>

#include "aoicache/env/config.hpp"
#include "aoicache/rng.hpp"

namespace aoicache::env {

/// Content requests: rows are contents (B*F), columns are ENs.
using RequestMatrix = Eigen::MatrixXi;

/// Per-EN Zipf popularity over all contents with a slowly reshuffling
/// rank order (random transpositions).
class PopularityProcess {
 public:
  PopularityProcess() = default;

  /// Skews drawn from cfg.skew_choices with `skew_rng`; initial rankings
  /// are uniform random permutations drawn from `rank_rng`.
  static PopularityProcess create(const NetworkConfig& cfg, Rng& skew_rng, Rng& rank_rng);

  /// Explicit construction; ranks[b][f] is the 1-based rank of content f at EN b.
  PopularityProcess(std::vector<std::vector<int>> ranks, std::vector<double> skews,
                    double swap_prob);

  int num_ens() const { return static_cast<int>(skews_.size()); }
  int num_contents() const { return skews_.empty() ? 0 : static_cast<int>(ranks_[0].size()); }
  const std::vector<int>& ranks(int en) const { return ranks_[en]; }
  double skew(int en) const { return skews_[en]; }
  double swap_prob() const { return swap_prob_; }

  /// p_{f,b} = rank^-skew / sum_f' rank'^-skew.
  std::vector<double> probabilities(int en) const;

  /// With probability q per EN, exchange the ranks of two distinct contents.
  void advance(Rng& rng);

  bool is_permutation() const;

 private:
  std::vector<std::vector<int>> ranks_;
  std::vector<double> skews_;
  double swap_prob_ = 0.0;
};

/// Multinomial draw of `users` requests per EN over the current popularity,
/// then advances the rank process.
RequestMatrix sample_requests(PopularityProcess& pop, int users, Rng& rng);

}  // namespace aoicache::env
