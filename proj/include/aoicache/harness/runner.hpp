#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "aoicache/harness/experiment.hpp"
#include "aoicache/harness/metrics.hpp"

namespace aoicache::harness {

/// Seed streams derived from a run seed so that training, evaluation and
/// the learner never share random draws.
struct RunSeeds {
  std::uint64_t train_env, learner, buffer, eval_env, eval_policy;
  static RunSeeds from(std::uint64_t seed);
};

struct TrainingResult {
  std::unique_ptr<agents::Learner> learner;
  std::vector<double> rewards;     // every epoch
  std::vector<double> ma_rewards;  // every epoch
  std::vector<MetricsRecord> records;  // every metrics_stride epochs
  double final_ma_reward = 0.0;
  std::string metrics_path;
  std::string checkpoint_path;
  std::string manifest_path;
};

using ProgressFn = std::function<void(std::uint64_t epoch, double ma_reward)>;

/// Trains cfg.algorithm for cfg.train_epochs on one seed. When cfg.out_dir
/// is set, writes metrics_<algo>_<seed>.csv, checkpoint_<algo>_<seed>.json
/// and manifest_<algo>_<seed>.json there.
TrainingResult run_training(const ExperimentConfig& cfg, std::uint64_t seed, const ProgressFn& progress = {});

struct EvalResult {
  std::uint64_t epochs = 0;
  double mean_reward = 0.0;
  double mean_cost = 0.0;
  double mean_aoi = 0.0;
  double mean_energy = 0.0;
  double mean_traffic = 0.0;
  double std_cost = 0.0;
  double std_aoi = 0.0;
  double std_energy = 0.0;
  double std_traffic = 0.0;
};

/// Runs the execution policy (no exploration beyond the policy's own
/// sampling; DQN acts greedily) for cfg.eval_epochs on a fresh environment
/// seeded independently of training. Costs use cfg.scenario's weights.
EvalResult evaluate(agents::Learner& learner, const ExperimentConfig& cfg, std::uint64_t seed);

/// Restores a checkpoint (ConfigError on a shape mismatch) and evaluates it.
EvalResult run_evaluation(const nlohmann::json& checkpoint, const ExperimentConfig& cfg, std::uint64_t seed);
EvalResult run_evaluation(const std::string& checkpoint_path, const ExperimentConfig& cfg, std::uint64_t seed);

nlohmann::json eval_to_json(const EvalResult& r);

enum class SweepParam { num_ens, sensors_per_en, omega1, omega2 };
std::string to_string(SweepParam p);
SweepParam sweep_param_from_string(const std::string& s);
void apply_sweep_value(ExperimentConfig& cfg, SweepParam p, double value);

struct SweepCell {
  double value = 0.0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string message;
  EvalResult eval;
};

struct SweepResult {
  SweepParam param = SweepParam::omega1;
  agents::Algorithm algorithm = agents::Algorithm::madsac_cc;
  std::vector<double> values;
  std::vector<SweepCell> cells;

  /// Mean over successful seeds of one metric ("cost", "aoi", "energy",
  /// "traffic", "reward") at one swept value. NaN if no seed succeeded.
  double seed_mean(double value, const std::string& metric) const;
};

double metric_of(const EvalResult& r, const std::string& metric);

/// Trains and evaluates every (value, seed). Failing cells are recorded and
/// the sweep continues. Writes sweep_<param>.csv when cfg.out_dir is set.
SweepResult run_sweep(const ExperimentConfig& base, SweepParam param, const std::vector<double>& values,
                      const ProgressFn& progress = {});

inline constexpr const char* kSweepHeader = "parameter,value,algorithm,seed,metric,mean,std,eval_epochs,status";
void write_sweep_csv(std::ostream& os, const SweepResult& r);

std::string build_identifier();

}  // namespace aoicache::harness
