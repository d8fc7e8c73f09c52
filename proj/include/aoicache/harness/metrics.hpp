#pragma once

#include <cstdint>
#include <deque>
#include <ostream>
#include <string>
#include <vector>

namespace aoicache::harness {

struct MetricsRecord {
  std::uint64_t epoch = 0;  // 1-based
  double reward = 0.0;
  double ma_reward = 0.0;
  double aoi = 0.0;
  double energy = 0.0;
  double traffic = 0.0;
  double alpha = 0.0;
  double loss_q = 0.0;
  double loss_pi = 0.0;
  double loss_alpha = 0.0;
  double q_lr = 0.0;
  double policy_lr = 0.0;
};

inline constexpr const char* kMetricsHeader = "epoch,reward,ma_reward,aoi,energy,traffic,alpha,loss_q,loss_pi,loss_alpha";

void write_metrics_row(std::ostream& os, const MetricsRecord& r);

/// Mean of the most recent min(window, count) values, summed oldest first
/// so that it equals a direct recomputation bit for bit.
class MovingAverage {
 public:
  explicit MovingAverage(std::size_t window);
  double push(double value);
  double value() const;
  std::size_t count() const { return values_.size(); }

 private:
  std::size_t window_;
  std::deque<double> values_;
};

/// Running mean and population standard deviation (Welford).
class RunningStats {
 public:
  void push(double x);
  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double stddev() const;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// First 1-based epoch at which `curve` reaches start + fraction * (end - start),
/// searching from `from_epoch`. Returns curve.size() + 1 when never reached.
std::uint64_t epochs_to_fraction(const std::vector<double>& curve, double start, double end, double fraction,
                                 std::uint64_t from_epoch = 1);

std::string format_number(double v);

}  // namespace aoicache::harness
