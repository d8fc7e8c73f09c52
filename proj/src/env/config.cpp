#include "aoicache/env/config.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "aoicache/errors.hpp"

namespace aoicache::env {

double NetworkConfig::noise_psd_w_hz() const { return std::pow(10.0, (noise_psd_dbm_hz - 30.0) / 10.0); }

void NetworkConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("scenario: " + what); };
  if (num_ens < 1) fail("num_ens must be >= 1");
  if (sensors_per_en < 1) fail("sensors_per_en must be >= 1");
  if (aoi_max < 2) fail("aoi_max must be >= 2");
  if (!(content_size_min_gb > 0.0) || content_size_max_gb < content_size_min_gb)
    fail("content size range must be positive and ordered");
  if (!(tx_power_watts > 0.0)) fail("tx_power_watts must be positive");
  if (!(bandwidth_hz > 0.0)) fail("bandwidth_hz must be positive");
  if (!std::isfinite(noise_psd_dbm_hz)) fail("noise_psd_dbm_hz must be finite");
  if (!(shadowing_sigma_db >= 0.0)) fail("shadowing_sigma_db must be non-negative");
  if (!(snr_threshold > 0.0)) fail("snr_threshold must be positive");
  if (!(coverage_radius_km > 0.0) || !(min_distance_km > 0.0) ||
      min_distance_km > coverage_radius_km)
    fail("distances must satisfy 0 < min_distance_km <= coverage_radius_km");
  if (!(weight_energy >= 0.0) || !(weight_traffic >= 0.0)) fail("weights must be non-negative");
  if (users_per_en < 0) fail("users_per_en must be >= 0");
  if (skew_choices.empty()) fail("skew_choices must not be empty");
  for (double s : skew_choices)
    if (!(s >= 0.0)) fail("zipf skews must be non-negative");
  if (!(rank_swap_prob >= 0.0 && rank_swap_prob <= 1.0)) fail("rank_swap_prob must lie in [0, 1]");
  if (!(energy_unit > 0.0)) fail("energy_unit must be positive");
}

std::uint64_t joint_action_count(const NetworkConfig& cfg) {
  const auto base = static_cast<std::uint64_t>(cfg.local_actions());
  std::uint64_t n = 1;
  for (int b = 0; b < cfg.num_ens; ++b) {
    if (n > std::numeric_limits<std::uint64_t>::max() / base) return std::numeric_limits<std::uint64_t>::max();
    n *= base;
  }
  return n;
}

int sensor_of_action(const NetworkConfig& cfg, int en, int local_action) {
  if (local_action == 0) return -1;
  return en * cfg.sensors_per_en + (local_action - 1);
}

}  // namespace aoicache::env
