#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "aoicache/env/channel.hpp"
#include "aoicache/env/config.hpp"
#include "aoicache/env/popularity.hpp"
#include "aoicache/rng.hpp"

namespace aoicache::env {

/// One local action per EN: 0 = idle, i in 1..F = update the EN's i-th sensor.
using JointAction = std::vector<int>;

struct EnvState {
  std::uint64_t epoch = 0;
  std::vector<int> aoi;   // length B*F, each in [1, T_max]
  RequestMatrix requests; // (B*F) x B
};

struct CostParts {
  double aoi = 0.0;      // request-weighted average AoI
  double energy = 0.0;   // sum of average update energies (energy units)
  double traffic = 0.0;  // fronthaul volume (B-1) s_f summed over ENs, GB
};

double weighted_cost(const CostParts& parts, const NetworkConfig& cfg);

struct StepOutcome {
  EnvState next;
  double reward = 0.0;
  CostParts parts;
};

/// Throws ConfigError (contract violation) unless a_b in {0..F} for every EN.
void validate_action(const JointAction& action, const NetworkConfig& cfg);

/// Request-weighted mean AoI; plain mean when no requests arrived.
double average_aoi(const std::vector<int>& aoi, const RequestMatrix& requests);

/// AoI transition: updated items become 1, all others age by one, capped.
std::vector<int> next_aoi(const std::vector<int>& aoi, const JointAction& action,
                          const NetworkConfig& cfg);

/// Cost of an epoch given the post-transition AoI and newly arrived requests.
CostParts epoch_cost(const std::vector<int>& aoi_next, const RequestMatrix& requests_next,
                     const JointAction& action, const ChannelRealization& channel,
                     const NetworkConfig& cfg);

StepOutcome step(const EnvState& state, const JointAction& action, PopularityProcess& pop,
                 const ChannelRealization& channel, const NetworkConfig& cfg, Rng& rng);

struct ResetResult {
  EnvState state;
  PopularityProcess popularity;
  ChannelRealization channel;
  Rng rng;  // dynamics stream, positioned after the initial request draw
};

/// Topology and skews come from cfg.topology_seed; rankings and requests
/// from `seed`. All AoI start at T_max.
ResetResult reset(const NetworkConfig& cfg, std::uint64_t seed);

/// AoI/T_max for every content followed by EN b's request column / U.
Eigen::VectorXd observe_local(const EnvState& state, int en, const NetworkConfig& cfg);

/// AoI/T_max followed by every EN's request column / U; equals
/// observe_local(state, 0) when B = 1.
Eigen::VectorXd global_features(const EnvState& state, const NetworkConfig& cfg);

/// All local observations stacked (B blocks of 2BF).
Eigen::VectorXd stacked_local(const EnvState& state, const NetworkConfig& cfg);

/// Rebuilds global features from stacked local observations.
Eigen::VectorXd global_from_stacked(const Eigen::VectorXd& stacked, const NetworkConfig& cfg);

inline int local_obs_size(const NetworkConfig& cfg) { return 2 * cfg.num_sensors(); }
inline int global_obs_size(const NetworkConfig& cfg) { return cfg.num_sensors() * (1 + cfg.num_ens); }

/// Stateful convenience wrapper bundling one environment instance.
class Environment {
 public:
  Environment(NetworkConfig cfg, std::uint64_t seed);

  const NetworkConfig& config() const { return cfg_; }
  const EnvState& state() const { return state_; }
  const ChannelRealization& channel() const { return channel_; }
  const PopularityProcess& popularity() const { return pop_; }

  StepOutcome step(const JointAction& action);

 private:
  NetworkConfig cfg_;
  ChannelRealization channel_;
  PopularityProcess pop_;
  EnvState state_;
  Rng rng_;
};

}  // namespace aoicache::env
