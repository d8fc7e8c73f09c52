#pragma once

#include <cstdint>
#include <vector>

namespace aoicache::env {

inline constexpr double kBitsPerGigabyte = 8e9;

/// Immutable scenario description. Defaults reproduce the reference
/// three-EN, ten-sensor deployment.
struct NetworkConfig {
  int num_ens = 3;           // B
  int sensors_per_en = 10;   // F
  int aoi_max = 50;          // T_max
  double content_size_min_gb = 0.05;
  double content_size_max_gb = 0.1;
  double tx_power_watts = 0.1;        // 20 dBm
  double bandwidth_hz = 1e7;          // B0
  double noise_psd_dbm_hz = -174.0;   // N0
  double antenna_gain_db = 10.0;
  double shadowing_sigma_db = 8.0;
  double snr_threshold = 10.0;        // linear (10 dB)
  double coverage_radius_km = 0.1;
  double min_distance_km = 0.001;
  double weight_energy = 1.0;   // omega_1
  double weight_traffic = 1.0;  // omega_2
  int users_per_en = 100;       // U
  std::vector<double> skew_choices{0.5, 1.0, 1.5, 2.0};
  double rank_swap_prob = 0.1;  // q
  double energy_unit = 1.0;     // joules -> cost units
  std::uint64_t topology_seed = 7;

  int num_sensors() const { return num_ens * sensors_per_en; }
  int local_actions() const { return sensors_per_en + 1; }
  double noise_psd_w_hz() const;

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
};

/// (F+1)^B, saturating at UINT64_MAX.
std::uint64_t joint_action_count(const NetworkConfig& cfg);

/// Global sensor index (0-based) selected by local action a_b at EN b, or -1 when idle.
int sensor_of_action(const NetworkConfig& cfg, int en, int local_action);

/// Owning EN of a (0-based) sensor index.
inline int en_of_sensor(const NetworkConfig& cfg, int sensor) { return sensor / cfg.sensors_per_en; }

}  // namespace aoicache::env
