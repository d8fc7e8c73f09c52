#include "aoicache/harness/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "aoicache/agents/replay_buffer.hpp"
#include "aoicache/agents/train_step.hpp"
#include "aoicache/errors.hpp"
#include "aoicache/nncore/checkpoint.hpp"

#ifndef AOICACHE_BUILD_ID
#define AOICACHE_BUILD_ID "unknown"
#endif

namespace aoicache::harness {

namespace fs = std::filesystem;

std::string build_identifier() { return AOICACHE_BUILD_ID; }

RunSeeds RunSeeds::from(std::uint64_t seed) {
  return {derive_seed(seed, 0x7e1), derive_seed(seed, 0x1ea), derive_seed(seed, 0xb0f), derive_seed(seed, 0xe7a1),
          derive_seed(seed, 0xe7a2)};
}

namespace {

std::string run_stem(const ExperimentConfig& cfg, std::uint64_t seed) {
  return agents::to_string(cfg.algorithm) + "_" + std::to_string(seed);
}

nlohmann::json manifest(const ExperimentConfig& cfg, std::uint64_t seed) {
  nlohmann::json resolved = nlohmann::json::object();
  for (const auto& [k, v] : resolved_values(cfg)) resolved[k] = v;
  return {{"build", build_identifier()},
          {"algorithm", agents::to_string(cfg.algorithm)},
          {"seed", seed},
          {"config", resolved}};
}

}  // namespace

TrainingResult run_training(const ExperimentConfig& cfg, std::uint64_t seed, const ProgressFn& progress) {
  cfg.validate();
  const RunSeeds seeds = RunSeeds::from(seed);
  const env::NetworkConfig scenario = training_scenario(cfg);
  const agents::Hyper hyper = training_hyper(cfg);

  TrainingResult result;
  result.learner = agents::make_learner(cfg.algorithm, scenario, hyper, seeds.learner);
  env::Environment environment(scenario, seeds.train_env);
  agents::ReplayBuffer buffer(hyper.buffer_capacity, seeds.buffer);
  MovingAverage ma(cfg.ma_window);

  std::ofstream csv;
  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    result.metrics_path = (fs::path(cfg.out_dir) / ("metrics_" + run_stem(cfg, seed) + ".csv")).string();
    csv.open(result.metrics_path);
    if (!csv) throw ConfigError("cannot write '" + result.metrics_path + "'");
    csv << kMetricsHeader << '\n';
  }

  result.rewards.reserve(cfg.train_epochs);
  result.ma_rewards.reserve(cfg.train_epochs);
  for (std::uint64_t t = 1; t <= cfg.train_epochs; ++t) {
    const agents::TrainStepResult step =
        agents::train_step(environment, *result.learner, buffer, hyper.batch_size);
    // Rewards are reported under the experiment's weights even when the
    // learner optimizes a different objective.
    const double reward = -env::weighted_cost(step.outcome.parts, cfg.scenario);
    const double avg = ma.push(reward);
    result.rewards.push_back(reward);
    result.ma_rewards.push_back(avg);
    if ((t - 1) % cfg.metrics_stride == 0 || t == cfg.train_epochs) {
      MetricsRecord r;
      r.epoch = t;
      r.reward = reward;
      r.ma_reward = avg;
      r.aoi = step.outcome.parts.aoi;
      r.energy = step.outcome.parts.energy;
      r.traffic = step.outcome.parts.traffic;
      r.alpha = result.learner->alpha();
      r.loss_q = step.stats.loss_q;
      r.loss_pi = step.stats.loss_pi;
      r.loss_alpha = step.stats.loss_alpha;
      r.q_lr = step.stats.q_lr;
      r.policy_lr = step.stats.policy_lr;
      result.records.push_back(r);
      if (csv.is_open()) write_metrics_row(csv, r);
    }
    if (progress && t % 1000 == 0) progress(t, avg);
  }
  result.final_ma_reward = result.ma_rewards.back();

  if (!cfg.out_dir.empty()) {
    result.checkpoint_path = (fs::path(cfg.out_dir) / ("checkpoint_" + run_stem(cfg, seed) + ".json")).string();
    nn::save_json(result.checkpoint_path, result.learner->to_json());
    result.manifest_path = (fs::path(cfg.out_dir) / ("manifest_" + run_stem(cfg, seed) + ".json")).string();
    nlohmann::json m = manifest(cfg, seed);
    m["final_ma_reward"] = result.final_ma_reward;
    m["metrics"] = fs::path(result.metrics_path).filename().string();
    m["checkpoint"] = fs::path(result.checkpoint_path).filename().string();
    nn::save_json(result.manifest_path, m);
  }
  return result;
}

EvalResult evaluate(agents::Learner& learner, const ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const RunSeeds seeds = RunSeeds::from(seed);
  learner.reseed(seeds.eval_policy);
  env::Environment environment(cfg.scenario, seeds.eval_env);
  RunningStats cost, aoi, energy, traffic;
  double reward_sum = 0.0;
  double cost_sum = 0.0;
  for (std::uint64_t t = 0; t < cfg.eval_epochs; ++t) {
    const env::JointAction a = learner.act(env::stacked_local(environment.state(), cfg.scenario), false);
    const env::StepOutcome o = environment.step(a);
    const double c = env::weighted_cost(o.parts, cfg.scenario);
    cost_sum += c;
    reward_sum += -c;
    cost.push(c);
    aoi.push(o.parts.aoi);
    energy.push(o.parts.energy);
    traffic.push(o.parts.traffic);
  }
  const double n = static_cast<double>(cfg.eval_epochs);
  EvalResult r;
  r.epochs = cfg.eval_epochs;
  r.mean_cost = cost_sum / n;
  r.mean_reward = reward_sum / n;
  r.mean_aoi = aoi.mean();
  r.mean_energy = energy.mean();
  r.mean_traffic = traffic.mean();
  r.std_cost = cost.stddev();
  r.std_aoi = aoi.stddev();
  r.std_energy = energy.stddev();
  r.std_traffic = traffic.stddev();
  return r;
}

EvalResult run_evaluation(const nlohmann::json& checkpoint, const ExperimentConfig& cfg, std::uint64_t seed) {
  auto learner =
      agents::load_learner(checkpoint, training_scenario(cfg), training_hyper(cfg), RunSeeds::from(seed).learner);
  return evaluate(*learner, cfg, seed);
}

EvalResult run_evaluation(const std::string& checkpoint_path, const ExperimentConfig& cfg, std::uint64_t seed) {
  return run_evaluation(nn::load_json(checkpoint_path), cfg, seed);
}

nlohmann::json eval_to_json(const EvalResult& r) {
  return {{"epochs", r.epochs},           {"mean_reward", r.mean_reward}, {"mean_cost", r.mean_cost},
          {"mean_aoi", r.mean_aoi},       {"mean_energy", r.mean_energy}, {"mean_traffic", r.mean_traffic},
          {"std_cost", r.std_cost},       {"std_aoi", r.std_aoi},         {"std_energy", r.std_energy},
          {"std_traffic", r.std_traffic}};
}

std::string to_string(SweepParam p) {
  switch (p) {
    case SweepParam::num_ens: return "num_ens";
    case SweepParam::sensors_per_en: return "sensors_per_en";
    case SweepParam::omega1: return "omega1";
    case SweepParam::omega2: return "omega2";
  }
  return "unknown";
}

SweepParam sweep_param_from_string(const std::string& s) {
  for (auto p : {SweepParam::num_ens, SweepParam::sensors_per_en, SweepParam::omega1, SweepParam::omega2})
    if (to_string(p) == s) return p;
  throw ConfigError("unknown sweep parameter '" + s + "' (expected num_ens, sensors_per_en, omega1, omega2)");
}

void apply_sweep_value(ExperimentConfig& cfg, SweepParam p, double value) {
  auto as_count = [&](const char* what) {
    if (value < 1 || value != std::floor(value))
      throw ConfigError(std::string(what) + " must be a positive integer");
    return static_cast<int>(value);
  };
  switch (p) {
    case SweepParam::num_ens: cfg.scenario.num_ens = as_count("num_ens"); break;
    case SweepParam::sensors_per_en: cfg.scenario.sensors_per_en = as_count("sensors_per_en"); break;
    case SweepParam::omega1: cfg.scenario.weight_energy = value; break;
    case SweepParam::omega2: cfg.scenario.weight_traffic = value; break;
  }
}

double metric_of(const EvalResult& r, const std::string& metric) {
  if (metric == "cost") return r.mean_cost;
  if (metric == "reward") return r.mean_reward;
  if (metric == "aoi") return r.mean_aoi;
  if (metric == "energy") return r.mean_energy;
  if (metric == "traffic") return r.mean_traffic;
  throw ConfigError("unknown metric '" + metric + "'");
}

double SweepResult::seed_mean(double value, const std::string& metric) const {
  double sum = 0.0;
  int n = 0;
  for (const auto& c : cells)
    if (c.value == value && c.ok) {
      sum += metric_of(c.eval, metric);
      ++n;
    }
  return n > 0 ? sum / n : std::nan("");
}

void write_sweep_csv(std::ostream& os, const SweepResult& r) {
  os << kSweepHeader << '\n';
  const std::string param = to_string(r.param);
  const std::string algo = agents::to_string(r.algorithm);
  for (const auto& c : r.cells) {
    const std::string prefix = param + ',' + format_number(c.value) + ',' + algo + ',' + std::to_string(c.seed) + ',';
    if (!c.ok) {
      std::string msg = c.message;
      for (auto& ch : msg)
        if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
      os << prefix << "cost,nan,nan,0,failed: " << msg << '\n';
      continue;
    }
    const std::pair<const char*, std::pair<double, double>> rows[] = {
        {"cost", {c.eval.mean_cost, c.eval.std_cost}},
        {"aoi", {c.eval.mean_aoi, c.eval.std_aoi}},
        {"energy", {c.eval.mean_energy, c.eval.std_energy}},
        {"traffic", {c.eval.mean_traffic, c.eval.std_traffic}},
    };
    for (const auto& [name, ms] : rows)
      os << prefix << name << ',' << format_number(ms.first) << ',' << format_number(ms.second) << ','
         << c.eval.epochs << ",ok\n";
  }
}

SweepResult run_sweep(const ExperimentConfig& base, SweepParam param, const std::vector<double>& values,
                      const ProgressFn& progress) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  SweepResult result;
  result.param = param;
  result.algorithm = base.algorithm;
  result.values = values;
  for (double v : values)
    for (std::uint64_t seed : base.seeds) {
      SweepCell cell;
      cell.value = v;
      cell.seed = seed;
      try {
        ExperimentConfig cfg = base;
        apply_sweep_value(cfg, param, v);
        cfg.out_dir.clear();
        TrainingResult tr = run_training(cfg, seed, progress);
        cell.eval = evaluate(*tr.learner, cfg, seed);
        cell.ok = true;
      } catch (const std::exception& e) {
        cell.message = e.what();
      }
      result.cells.push_back(std::move(cell));
    }
  if (!base.out_dir.empty()) {
    fs::create_directories(base.out_dir);
    const auto path = fs::path(base.out_dir) / ("sweep_" + to_string(param) + ".csv");
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write '" + path.string() + "'");
    write_sweep_csv(os, result);
  }
  return result;
}

}  // namespace aoicache::harness
