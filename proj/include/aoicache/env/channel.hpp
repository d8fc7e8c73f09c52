#pragma once

#include <cstdint>
#include <vector>

#include "aoicache/env/config.hpp"

namespace aoicache::env {

/// Static per-sensor draws: placement, large-scale gain and content size.
/// Small-scale Rayleigh fading is never sampled; it is integrated out in
/// the average-energy model.
struct ChannelRealization {
  std::vector<double> distance_km;
  std::vector<double> gain;          // chi_f^2, linear
  std::vector<double> beta;          // P chi^2 / (N0 B0)
  std::vector<double> content_bits;  // s_f
  std::vector<double> energy_j;      // average transmission energy per update

  double content_gb(int sensor) const { return content_bits[sensor] / kBitsPerGigabyte; }
};

/// -(148.1 + 37.6 log10 d) dB, d in km.
double pathloss_db(double distance_km);

/// Places each sensor uniformly in its EN's coverage disc and draws
/// shadowing and content sizes. Deterministic in `seed`.
ChannelRealization build_topology(const NetworkConfig& cfg, std::uint64_t seed);

/// Exponential integral E1(z) for z > 0.
double expint_e1(double z);

/// exp(z) * E1(z), stable for large z.
double expint_e1_scaled(double z);

/// rho(x) = integral_x^inf u^-1 exp(-u / (2 beta)) du = E1(x / (2 beta)).
/// Throws DomainError unless x > 0 and beta > 0.
double exp_integral_rho(double x, double beta);

/// log2(1 + eta_th).
double throughput_threshold(double snr_threshold);

/// Natural log of the expected successful-transmission throughput (bit/s)
/// under Rayleigh fading with mean SNR 2*beta and an SNR cutoff.
double log_expected_throughput(double beta, double snr_threshold, double bandwidth_hz);

/// Expected throughput in bit/s (may underflow to 0 for tiny beta).
double expected_throughput(double beta, double snr_threshold, double bandwidth_hz);

/// P s / R. Throws DomainError with an infinite-energy diagnostic when the
/// throughput underflows.
double average_energy(double tx_power_w, double content_bits, double beta, double snr_threshold,
                      double bandwidth_hz);

double average_energy(int sensor, const ChannelRealization& channel, const NetworkConfig& cfg);

}  // namespace aoicache::env
