#include "aoicache/env/channel.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "aoicache/errors.hpp"
#include "aoicache/rng.hpp"

namespace aoicache::env {

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;

// Power series, accurate for 0 < z <= 1.
double e1_series(double z) {
  double sum = 0.0;
  double term = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= -z / k;
    const double add = term / k;
    sum += add;
    if (std::abs(add) < 1e-17 * std::abs(sum)) break;
  }
  return -kEulerGamma - std::log(z) - sum;
}

// Continued fraction (modified Lentz) for exp(z) E1(z), z > 1.
double e1_scaled_fraction(double z) {
  constexpr double tiny = 1e-300;
  double b = z + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h;
}

}  // namespace

double pathloss_db(double distance_km) { return -(148.1 + 37.6 * std::log10(distance_km)); }

ChannelRealization build_topology(const NetworkConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(derive_seed(seed, 0x70701));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> shadow(0.0, cfg.shadowing_sigma_db);
  std::uniform_real_distribution<double> size_gb(cfg.content_size_min_gb, cfg.content_size_max_gb);

  const int n = cfg.num_sensors();
  const double noise_w = cfg.noise_psd_w_hz() * cfg.bandwidth_hz;
  ChannelRealization ch;
  ch.distance_km.resize(n);
  ch.gain.resize(n);
  ch.beta.resize(n);
  ch.content_bits.resize(n);
  ch.energy_j.resize(n);
  for (int f = 0; f < n; ++f) {
    const double d = std::max(cfg.min_distance_km, cfg.coverage_radius_km * std::sqrt(unit(rng)));
    const double gain_db = pathloss_db(d) + cfg.antenna_gain_db + shadow(rng);
    ch.distance_km[f] = d;
    ch.gain[f] = std::pow(10.0, gain_db / 10.0);
    ch.beta[f] = cfg.tx_power_watts * ch.gain[f] / noise_w;
    ch.content_bits[f] = size_gb(rng) * kBitsPerGigabyte;
  }
  for (int f = 0; f < n; ++f) ch.energy_j[f] = average_energy(f, ch, cfg);
  return ch;
}

double expint_e1(double z) {
  if (!(z > 0.0)) throw DomainError("E1 requires z > 0");
  if (z <= 1.0) return e1_series(z);
  return e1_scaled_fraction(z) * std::exp(-z);
}

double expint_e1_scaled(double z) {
  if (!(z > 0.0)) throw DomainError("E1 requires z > 0");
  if (z <= 1.0) return std::exp(z) * e1_series(z);
  return e1_scaled_fraction(z);
}

double exp_integral_rho(double x, double beta) {
  if (!(x > 0.0)) throw DomainError("rho(x): integrand is singular for x <= 0");
  if (!(beta > 0.0)) throw DomainError("rho(x): beta must be positive");
  return expint_e1(x / (2.0 * beta));
}

double throughput_threshold(double snr_threshold) { return std::log2(1.0 + snr_threshold); }

double log_expected_throughput(double beta, double snr_threshold, double bandwidth_hz) {
  if (!(beta > 0.0) || !(snr_threshold > 0.0) || !(bandwidth_hz > 0.0))
    throw DomainError("expected throughput needs positive beta, threshold and bandwidth");
  const double x = (snr_threshold + 1.0) / (2.0 * beta);
  const double bracket = throughput_threshold(snr_threshold) + expint_e1_scaled(x) / std::numbers::ln2;
  return std::log(bandwidth_hz) - snr_threshold / (2.0 * beta) + std::log(bracket);
}

double expected_throughput(double beta, double snr_threshold, double bandwidth_hz) {
  return std::exp(log_expected_throughput(beta, snr_threshold, bandwidth_hz));
}

double average_energy(double tx_power_w, double content_bits, double beta, double snr_threshold,
                      double bandwidth_hz) {
  const double log_rate = log_expected_throughput(beta, snr_threshold, bandwidth_hz);
  const double rate = std::exp(log_rate);
  const double energy = tx_power_w * content_bits / rate;
  if (!(rate > 0.0) || !std::isfinite(energy)) {
    std::ostringstream msg;
    msg << "infinite average energy: expected throughput underflows (beta=" << beta
        << ", snr_threshold=" << snr_threshold << ", log(throughput)=" << log_rate << ")";
    throw DomainError(msg.str());
  }
  return energy;
}

double average_energy(int sensor, const ChannelRealization& channel, const NetworkConfig& cfg) {
  return cfg.energy_unit * average_energy(cfg.tx_power_watts, channel.content_bits[sensor],
                                          channel.beta[sensor], cfg.snr_threshold, cfg.bandwidth_hz);
}

}  // namespace aoicache::env
