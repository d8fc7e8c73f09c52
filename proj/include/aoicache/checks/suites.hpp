#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace aoicache::checks {

struct CriterionResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

/// One line: "PASS|FAIL  <name>  (<seconds>s / budget <budget>s)  <detail>".
void print_result(std::ostream& os, const CriterionResult& r);

// Fast property suites.
CriterionResult check_energy_fidelity();
CriterionResult check_expint_accuracy();
CriterionResult check_gumbel_max_fidelity(std::uint64_t seed = 11);
CriterionResult check_gs_limit(std::uint64_t seed = 12);
/// Block sums, monotone sharpening as c0 decreases, and hard argmax
/// distributed as the Gumbel-Max sampler.
CriterionResult check_gs_consistency(std::uint64_t seed = 16);
CriterionResult check_gradients(std::uint64_t seed = 13);
CriterionResult check_env_invariants(std::uint64_t seed = 14);
CriterionResult check_soft_policy_improvement(std::uint64_t seed = 15);
CriterionResult check_dqn_guard();

// Seeded training studies. `out_dir` (optional) receives the per-run CSVs.
CriterionResult check_learning_single(const std::string& out_dir = "");
CriterionResult check_multi_agent(const std::string& out_dir = "");
CriterionResult check_tradeoff(const std::string& out_dir = "");

struct Suite {
  std::string group;
  std::function<CriterionResult()> run;
};

/// Every criterion, tagged with the group used to split long runs.
std::vector<Suite> all_suites(const std::string& out_dir = "");

}  // namespace aoicache::checks
