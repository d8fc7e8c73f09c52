#include "aoicache/env/popularity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "aoicache/errors.hpp"

namespace aoicache::env {

PopularityProcess PopularityProcess::create(const NetworkConfig& cfg, Rng& skew_rng, Rng& rank_rng) {
  const int contents = cfg.num_sensors();
  std::vector<double> skews;
  std::vector<std::vector<int>> ranks;
  std::uniform_int_distribution<std::size_t> pick(0, cfg.skew_choices.size() - 1);
  for (int b = 0; b < cfg.num_ens; ++b) {
    skews.push_back(cfg.skew_choices[pick(skew_rng)]);
    std::vector<int> r(contents);
    std::iota(r.begin(), r.end(), 1);
    std::shuffle(r.begin(), r.end(), rank_rng);
    ranks.push_back(std::move(r));
  }
  return PopularityProcess(std::move(ranks), std::move(skews), cfg.rank_swap_prob);
}

PopularityProcess::PopularityProcess(std::vector<std::vector<int>> ranks, std::vector<double> skews,
                                     double swap_prob)
    : ranks_(std::move(ranks)), skews_(std::move(skews)), swap_prob_(swap_prob) {
  if (ranks_.size() != skews_.size()) throw ConfigError("popularity: one ranking per EN required");
  if (!is_permutation()) throw ConfigError("popularity: rankings must be permutations of 1..n");
}

std::vector<double> PopularityProcess::probabilities(int en) const {
  const auto& r = ranks_[en];
  std::vector<double> p(r.size());
  double total = 0.0;
  for (std::size_t f = 0; f < r.size(); ++f) {
    p[f] = std::pow(static_cast<double>(r[f]), -skews_[en]);
    total += p[f];
  }
  for (double& x : p) x /= total;
  return p;
}

void PopularityProcess::advance(Rng& rng) {
  std::bernoulli_distribution swap(swap_prob_);
  for (auto& r : ranks_) {
    if (r.size() < 2 || !swap(rng)) continue;
    std::uniform_int_distribution<std::size_t> first(0, r.size() - 1);
    std::uniform_int_distribution<std::size_t> second(0, r.size() - 2);
    const std::size_t i = first(rng);
    std::size_t j = second(rng);
    if (j >= i) ++j;
    std::swap(r[i], r[j]);
  }
}

bool PopularityProcess::is_permutation() const {
  for (const auto& r : ranks_) {
    std::vector<int> sorted = r;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i)
      if (sorted[i] != static_cast<int>(i) + 1) return false;
  }
  return true;
}

RequestMatrix sample_requests(PopularityProcess& pop, int users, Rng& rng) {
  RequestMatrix n = RequestMatrix::Zero(pop.num_contents(), pop.num_ens());
  for (int b = 0; b < pop.num_ens(); ++b) {
    if (users <= 0) continue;
    const auto p = pop.probabilities(b);
    std::discrete_distribution<int> pick(p.begin(), p.end());
    for (int u = 0; u < users; ++u) ++n(pick(rng), b);
  }
  pop.advance(rng);
  return n;
}

}  // namespace aoicache::env
