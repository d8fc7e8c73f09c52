#include "aoicache/env/environment.hpp"

#include <algorithm>
#include <string>

#include "aoicache/errors.hpp"

namespace aoicache::env {

double weighted_cost(const CostParts& parts, const NetworkConfig& cfg) {
  return parts.aoi + cfg.weight_energy * parts.energy + cfg.weight_traffic * parts.traffic;
}

void validate_action(const JointAction& action, const NetworkConfig& cfg) {
  if (static_cast<int>(action.size()) != cfg.num_ens)
    throw ConfigError("joint action has " + std::to_string(action.size()) + " entries, expected " +
                      std::to_string(cfg.num_ens));
  for (std::size_t b = 0; b < action.size(); ++b)
    if (action[b] < 0 || action[b] > cfg.sensors_per_en)
      throw ConfigError("local action " + std::to_string(action[b]) + " of EN " + std::to_string(b) +
                        " outside {0.." + std::to_string(cfg.sensors_per_en) + "}");
}

double average_aoi(const std::vector<int>& aoi, const RequestMatrix& requests) {
  long long total = 0;
  double weighted = 0.0;
  for (Eigen::Index f = 0; f < requests.rows(); ++f) {
    const long long nf = requests.row(f).sum();
    total += nf;
    weighted += static_cast<double>(aoi[f]) * static_cast<double>(nf);
  }
  if (total == 0) {
    double sum = 0.0;
    for (int o : aoi) sum += o;
    return sum / static_cast<double>(aoi.size());
  }
  return weighted / static_cast<double>(total);
}

std::vector<int> next_aoi(const std::vector<int>& aoi, const JointAction& action,
                          const NetworkConfig& cfg) {
  std::vector<int> out(aoi.size());
  for (std::size_t f = 0; f < aoi.size(); ++f) out[f] = std::min(aoi[f] + 1, cfg.aoi_max);
  for (int b = 0; b < cfg.num_ens; ++b) {
    const int f = sensor_of_action(cfg, b, action[b]);
    if (f >= 0) out[f] = 1;
  }
  return out;
}

CostParts epoch_cost(const std::vector<int>& aoi_next, const RequestMatrix& requests_next,
                     const JointAction& action, const ChannelRealization& channel,
                     const NetworkConfig& cfg) {
  CostParts parts;
  parts.aoi = average_aoi(aoi_next, requests_next);
  for (int b = 0; b < cfg.num_ens; ++b) {
    const int f = sensor_of_action(cfg, b, action[b]);
    if (f < 0) continue;
    parts.energy += channel.energy_j[f];
    parts.traffic += static_cast<double>(cfg.num_ens - 1) * channel.content_gb(f);
  }
  return parts;
}

StepOutcome step(const EnvState& state, const JointAction& action, PopularityProcess& pop,
                 const ChannelRealization& channel, const NetworkConfig& cfg, Rng& rng) {
  validate_action(action, cfg);
  StepOutcome out;
  out.next.epoch = state.epoch + 1;
  out.next.aoi = next_aoi(state.aoi, action, cfg);
  out.next.requests = sample_requests(pop, cfg.users_per_en, rng);
  out.parts = epoch_cost(out.next.aoi, out.next.requests, action, channel, cfg);
  out.reward = -weighted_cost(out.parts, cfg);
  return out;
}

ResetResult reset(const NetworkConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng skew_rng(derive_seed(cfg.topology_seed, 0x5e3));
  Rng rng(derive_seed(seed, 0xd1a));
  ResetResult r{EnvState{}, PopularityProcess{}, build_topology(cfg, cfg.topology_seed), Rng{}};
  r.popularity = PopularityProcess::create(cfg, skew_rng, rng);
  r.state.epoch = 0;
  r.state.aoi.assign(cfg.num_sensors(), cfg.aoi_max);
  r.state.requests = sample_requests(r.popularity, cfg.users_per_en, rng);
  r.rng = rng;
  return r;
}

Eigen::VectorXd observe_local(const EnvState& state, int en, const NetworkConfig& cfg) {
  const int n = cfg.num_sensors();
  Eigen::VectorXd obs(2 * n);
  const double inv_users = cfg.users_per_en > 0 ? 1.0 / cfg.users_per_en : 0.0;
  for (int f = 0; f < n; ++f) {
    obs[f] = static_cast<double>(state.aoi[f]) / cfg.aoi_max;
    obs[n + f] = state.requests(f, en) * inv_users;
  }
  return obs;
}

Eigen::VectorXd global_features(const EnvState& state, const NetworkConfig& cfg) {
  const int n = cfg.num_sensors();
  Eigen::VectorXd obs(global_obs_size(cfg));
  const double inv_users = cfg.users_per_en > 0 ? 1.0 / cfg.users_per_en : 0.0;
  for (int f = 0; f < n; ++f) obs[f] = static_cast<double>(state.aoi[f]) / cfg.aoi_max;
  for (int b = 0; b < cfg.num_ens; ++b)
    for (int f = 0; f < n; ++f) obs[n * (1 + b) + f] = state.requests(f, b) * inv_users;
  return obs;
}

Eigen::VectorXd stacked_local(const EnvState& state, const NetworkConfig& cfg) {
  const int len = local_obs_size(cfg);
  Eigen::VectorXd out(len * cfg.num_ens);
  for (int b = 0; b < cfg.num_ens; ++b) out.segment(b * len, len) = observe_local(state, b, cfg);
  return out;
}

Eigen::VectorXd global_from_stacked(const Eigen::VectorXd& stacked, const NetworkConfig& cfg) {
  const int n = cfg.num_sensors();
  const int len = local_obs_size(cfg);
  if (stacked.size() != static_cast<Eigen::Index>(len) * cfg.num_ens)
    throw ConfigError("stacked observation has wrong length");
  Eigen::VectorXd out(global_obs_size(cfg));
  out.head(n) = stacked.head(n);
  for (int b = 0; b < cfg.num_ens; ++b) out.segment(n * (1 + b), n) = stacked.segment(b * len + n, n);
  return out;
}

Environment::Environment(NetworkConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)) {
  auto r = reset(cfg_, seed);
  channel_ = std::move(r.channel);
  pop_ = std::move(r.popularity);
  state_ = std::move(r.state);
  rng_ = r.rng;
}

StepOutcome Environment::step(const JointAction& action) {
  auto out = env::step(state_, action, pop_, channel_, cfg_, rng_);
  state_ = out.next;
  return out;
}

}  // namespace aoicache::env
