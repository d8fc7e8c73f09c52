#pragma once

// Reference computations that share no code with the library paths they
// check: numerical quadrature instead of closed forms, direct loops
// instead of vectorized kernels.

#include <functional>
#include <string>
#include <vector>

namespace aoicache::checks {

/// integral_x^inf u^-1 exp(-u / (2 beta)) du by adaptive quadrature.
double rho_by_quadrature(double x, double beta);

/// Natural log of the expected throughput
/// integral_{eta}^inf B0 log2(1 + v) (1 / (2 beta)) exp(-v / (2 beta)) dv,
/// evaluated after the substitution v = eta + 2 beta u so that the
/// exp(-eta / (2 beta)) factor can be kept in log space.
double log_throughput_by_quadrature(double beta, double snr_threshold, double bandwidth_hz);

/// Entries smaller than this are left out of the reported relative error.
inline constexpr double kRelReportScale = 1e-6;

struct GradCheck {
  double max_rel_error = 0.0;  // worst over entries of magnitude >= kRelReportScale
  double max_abs_error = 0.0;
  std::size_t worst_index = 0;
  bool passed = false;
};

/// Compares `analytic` to central differences of `f` around `x` (restored
/// afterwards). An entry passes if its absolute error is <= abs_floor or
/// its relative error is <= rel_tol.
GradCheck check_gradient(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                         const std::vector<double>& analytic, double step = 1e-5, double rel_tol = 1e-4,
                         double abs_floor = 1e-7);

/// Total-variation distance between two distributions over the same support.
double total_variation(const std::vector<double>& p, const std::vector<double>& q);

/// Probability that a Gumbel-perturbed categorical with probabilities `p`
/// has its top value ahead of the runner-up by more than `gap`.
double gumbel_top_gap_probability(const std::vector<double>& p, double gap);

}  // namespace aoicache::checks
