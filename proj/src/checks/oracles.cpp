#include "aoicache/checks/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace aoicache::checks {

double rho_by_quadrature(double x, double beta) {
  // u = x + 2 beta v:  e^{-z} * integral_0^inf e^{-v} / (z + v) dv, z = x / (2 beta).
  // [0, 1] goes to tanh-sinh, which copes with the near-singular peak at small z.
  const double z = x / (2.0 * beta);
  auto f = [z](double v) { return std::exp(-v) / (z + v); };
  boost::math::quadrature::tanh_sinh<double> near;
  boost::math::quadrature::exp_sinh<double> far;
  const double tol = 1e-15;
  const double head = near.integrate(f, 0.0, 1.0, tol);
  const double tail = far.integrate(f, 1.0, std::numeric_limits<double>::infinity(), tol);
  return std::exp(-z) * (head + tail);
}

double log_throughput_by_quadrature(double beta, double snr_threshold, double bandwidth_hz) {
  const double two_beta = 2.0 * beta;
  auto f = [&](double u) { return std::log2(1.0 + snr_threshold + two_beta * u) * std::exp(-u); };
  boost::math::quadrature::exp_sinh<double> integrator;
  const double integral = integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-15);
  return std::log(bandwidth_hz) - snr_threshold / two_beta + std::log(integral);
}

GradCheck check_gradient(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                         const std::vector<double>& analytic, double step, double rel_tol, double abs_floor) {
  GradCheck out;
  out.passed = analytic.size() == x.size();
  for (std::size_t i = 0; i < x.size() && out.passed; ++i) {
    const double keep = x[i];
    x[i] = keep + step;
    const double up = f(x);
    x[i] = keep - step;
    const double down = f(x);
    x[i] = keep;
    const double numeric = (up - down) / (2.0 * step);
    const double abs_err = std::abs(numeric - analytic[i]);
    out.max_abs_error = std::max(out.max_abs_error, abs_err);
    const double scale = std::max(std::abs(numeric), std::abs(analytic[i]));
    const double rel = scale > 0.0 ? abs_err / scale : 0.0;
    // Reported over every entry of non-negligible size, even when the floor lets it pass.
    if (scale >= kRelReportScale && rel > out.max_rel_error) {
      out.max_rel_error = rel;
      out.worst_index = i;
    }
    if (abs_err > abs_floor && rel > rel_tol) out.passed = false;
  }
  return out;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

double gumbel_top_gap_probability(const std::vector<double>& p, double gap) {
  // P(X_i - max_{j != i} X_j > gap) = p_i / (p_i + (1 - p_i) e^gap): the
  // difference of two Gumbels is logistic.
  double s = 0.0;
  for (double pi : p)
    if (pi > 0) s += pi / (pi + (1.0 - pi) * std::exp(gap));
  return s;
}

}  // namespace aoicache::checks
