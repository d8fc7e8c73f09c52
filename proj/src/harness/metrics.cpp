#include "aoicache/harness/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "aoicache/errors.hpp"

namespace aoicache::harness {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_metrics_row(std::ostream& os, const MetricsRecord& r) {
  os << r.epoch << ',' << format_number(r.reward) << ',' << format_number(r.ma_reward) << ','
     << format_number(r.aoi) << ',' << format_number(r.energy) << ',' << format_number(r.traffic) << ','
     << format_number(r.alpha) << ',' << format_number(r.loss_q) << ',' << format_number(r.loss_pi) << ','
     << format_number(r.loss_alpha) << '\n';
}

MovingAverage::MovingAverage(std::size_t window) : window_(window) {
  if (window == 0) throw ConfigError("moving-average window must be positive");
}

double MovingAverage::push(double value) {
  values_.push_back(value);
  if (values_.size() > window_) values_.pop_front();
  return this->value();
}

double MovingAverage::value() const {
  if (values_.empty()) return std::nan("");
  double sum = 0.0;
  for (double v : values_) sum += v;
  return sum / static_cast<double>(values_.size());
}

void RunningStats::push(double x) {
  ++n_;
  const double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

double RunningStats::stddev() const { return n_ > 0 ? std::sqrt(m2_ / static_cast<double>(n_)) : 0.0; }

std::uint64_t epochs_to_fraction(const std::vector<double>& curve, double start, double end, double fraction,
                                 std::uint64_t from_epoch) {
  const double level = start + fraction * (end - start);
  const bool rising = end >= start;
  for (std::size_t i = from_epoch > 0 ? from_epoch - 1 : 0; i < curve.size(); ++i)
    if (rising ? curve[i] >= level : curve[i] <= level) return i + 1;
  return curve.size() + 1;
}

}  // namespace aoicache::harness
