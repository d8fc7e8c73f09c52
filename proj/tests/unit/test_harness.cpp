#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "aoicache/errors.hpp"
#include "aoicache/harness/experiment.hpp"
#include "aoicache/harness/metrics.hpp"
#include "aoicache/harness/runner.hpp"
#include "cli.hpp"

using namespace aoicache;
using namespace aoicache::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("aoicache_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig tiny_experiment() {
  ExperimentConfig cfg;
  cfg.scenario.num_ens = 1;
  cfg.scenario.sensors_per_en = 3;
  cfg.hyper.hidden = 8;
  cfg.hyper.batch_size = 8;
  cfg.train_epochs = 60;
  cfg.eval_epochs = 40;
  cfg.ma_window = 10;
  return cfg;
}

int run_cli(const std::vector<std::string>& args, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

}  // namespace

TEST_CASE("config parsing and scale") {
  const ExperimentConfig cfg = parse_config(
      "# comment\n"
      "hyper.q_lr = 0.005\n"
      "scale = paper\n"
      "train_epochs = 123  # trailing\n"
      "seeds = 1,4-6\n"
      "scenario.omega1 = 0.25\n"
      "algorithm = madsac_dc\n");
  CHECK(cfg.scenario.num_ens == 3);
  CHECK(cfg.scenario.sensors_per_en == 10);
  CHECK(cfg.train_epochs == 123);
  CHECK(cfg.eval_epochs == 10000);
  CHECK(cfg.hyper.q_lr == 0.005);
  CHECK(cfg.scenario.weight_energy == 0.25);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 4, 5, 6});
  CHECK(cfg.algorithm == agents::Algorithm::madsac_dc);

  ExperimentConfig desk;
  CHECK(desk.scenario.num_ens == 2);
  CHECK(desk.scenario.sensors_per_en == 5);
  CHECK_THROWS_AS(parse_config("nonsense.key = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("train_epochs = many\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(parse_seed_list("3-1"), ConfigError);
}

TEST_CASE("overrides and resolved values round trip") {
  ExperimentConfig cfg;
  apply_overrides(cfg, {"scenario.num_ens=4", "hyper.tau=0.01", "algorithm=dqn"});
  CHECK(cfg.scenario.num_ens == 4);
  CHECK(cfg.hyper.tau == 0.01);
  CHECK_THROWS_AS(apply_overrides(cfg, {"scenario.num_ens"}), ConfigError);

  std::string text;
  for (const auto& [k, v] : resolved_values(cfg)) text += k + " = " + v + "\n";
  const ExperimentConfig again = parse_config(text);
  CHECK(resolved_values(again) == resolved_values(cfg));
  CHECK(known_keys().size() == resolved_values(cfg).size() + 1);  // plus "scale"
}

TEST_CASE("age-optimal trains without cost weights") {
  ExperimentConfig cfg;
  cfg.algorithm = agents::Algorithm::age_optimal;
  const auto s = training_scenario(cfg);
  CHECK(s.weight_energy == 0.0);
  CHECK(s.weight_traffic == 0.0);
  CHECK(cfg.scenario.weight_energy == 1.0);
  cfg.train_epochs = 777;
  CHECK(training_hyper(cfg).total_steps == 777);
}

TEST_CASE("moving average equals direct recomputation") {
  MovingAverage ma(3);
  const std::vector<double> xs{0.1, 0.7, -0.3, 1e-9, 5.5, 0.2};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double got = ma.push(xs[i]);
    const std::size_t first = i + 1 > 3 ? i + 1 - 3 : 0;
    double sum = 0.0;
    for (std::size_t j = first; j <= i; ++j) sum += xs[j];
    CHECK(got == sum / static_cast<double>(i + 1 - first));
  }
  CHECK_THROWS_AS(MovingAverage(0), ConfigError);
}

TEST_CASE("running stats") {
  RunningStats s;
  for (double x : {2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0}) s.push(x);
  CHECK(s.mean() == doctest::Approx(5.0));
  CHECK(s.stddev() == doctest::Approx(2.0));
}

TEST_CASE("epochs to fraction") {
  const std::vector<double> curve{-10, -9, -6, -4, -2, -1};
  CHECK(epochs_to_fraction(curve, -10, -1, 0.5) == 4);
  CHECK(epochs_to_fraction(curve, -10, -1, 0.9) == 6);
  CHECK(epochs_to_fraction(curve, -10, -1, 0.4) == 3);
  CHECK(epochs_to_fraction(curve, -10, -1, 0.4, 5) == 5);
  CHECK(epochs_to_fraction({1, 2}, 0, 10, 0.9) == 3);
}

TEST_CASE("metrics rows follow the header") {
  std::ostringstream os;
  MetricsRecord r;
  r.epoch = 3;
  r.reward = -1.5;
  write_metrics_row(os, r);
  const std::string row = os.str();
  CHECK(std::count(row.begin(), row.end(), ',') ==
        std::count(kMetricsHeader, kMetricsHeader + std::char_traits<char>::length(kMetricsHeader), ','));
  CHECK(row.rfind("3,-1.5,", 0) == 0);
}

TEST_CASE("training is deterministic and writes its artifacts") {
  ExperimentConfig cfg = tiny_experiment();
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  cfg.out_dir = a.string();
  const auto ra = run_training(cfg, 3);
  cfg.out_dir = b.string();
  const auto rb = run_training(cfg, 3);
  CHECK(ra.rewards.size() == 60);
  CHECK(ra.rewards == rb.rewards);
  const std::string ma = slurp(a / "metrics_madsac_cc_3.csv");
  CHECK(ma == slurp(b / "metrics_madsac_cc_3.csv"));
  CHECK(ma.rfind(kMetricsHeader, 0) == 0);
  CHECK(std::count(ma.begin(), ma.end(), '\n') == 61);
  CHECK(slurp(a / "checkpoint_madsac_cc_3.json") == slurp(b / "checkpoint_madsac_cc_3.json"));
  const auto manifest = nlohmann::json::parse(slurp(a / "manifest_madsac_cc_3.json"));
  CHECK(manifest.contains("build"));
  CHECK(manifest.contains("config"));

  const auto rc = run_training(cfg, 4);
  CHECK(rc.rewards != ra.rewards);

  double direct = 0.0;
  for (std::size_t i = 50; i < 60; ++i) direct += ra.rewards[i];
  CHECK(ra.final_ma_reward == doctest::Approx(direct / 10.0).epsilon(1e-14));
}

TEST_CASE("evaluation of a checkpoint matches evaluation of the live learner") {
  ExperimentConfig cfg = tiny_experiment();
  const fs::path dir = scratch("eval");
  cfg.out_dir = dir.string();
  auto trained = run_training(cfg, 5);
  const EvalResult live = evaluate(*trained.learner, cfg, 5);
  const EvalResult restored = run_evaluation(trained.checkpoint_path, cfg, 5);
  CHECK(live.mean_cost == restored.mean_cost);
  CHECK(live.epochs == 40);
  CHECK(live.mean_reward == doctest::Approx(-live.mean_cost));
  CHECK(live.mean_cost == doctest::Approx(live.mean_aoi + cfg.scenario.weight_energy * live.mean_energy +
                                          cfg.scenario.weight_traffic * live.mean_traffic));
  const auto j = eval_to_json(live);
  CHECK(j.at("mean_cost").get<double>() == live.mean_cost);

  ExperimentConfig other = cfg;
  other.scenario.sensors_per_en = 4;
  CHECK_THROWS_AS(run_evaluation(trained.checkpoint_path, other, 5), ConfigError);
}

TEST_CASE("sweep records failing cells and keeps going") {
  ExperimentConfig cfg = tiny_experiment();
  cfg.algorithm = agents::Algorithm::dqn;
  cfg.train_epochs = 20;
  cfg.eval_epochs = 10;
  const fs::path dir = scratch("sweep");
  cfg.out_dir = dir.string();
  cfg.scenario.num_ens = 3;
  const auto result = run_sweep(cfg, SweepParam::sensors_per_en, {2, 20});
  REQUIRE(result.cells.size() == 2);
  CHECK(result.cells[0].ok);
  CHECK_FALSE(result.cells[1].ok);
  CHECK(result.cells[1].message.find("9261") != std::string::npos);
  CHECK(std::isnan(result.seed_mean(20, "cost")));
  CHECK(std::isfinite(result.seed_mean(2, "cost")));
  const std::string csv = slurp(dir / "sweep_sensors_per_en.csv");
  CHECK(csv.rfind(kSweepHeader, 0) == 0);
  CHECK(csv.find("failed") != std::string::npos);
}

TEST_CASE("sweep values map onto the scenario") {
  ExperimentConfig cfg;
  apply_sweep_value(cfg, SweepParam::omega2, 0.4);
  CHECK(cfg.scenario.weight_traffic == 0.4);
  apply_sweep_value(cfg, SweepParam::num_ens, 4);
  CHECK(cfg.scenario.num_ens == 4);
  CHECK_THROWS_AS(apply_sweep_value(cfg, SweepParam::num_ens, 2.5), ConfigError);
  CHECK(sweep_param_from_string("omega1") == SweepParam::omega1);
  CHECK_THROWS_AS(sweep_param_from_string("gamma"), ConfigError);
}

TEST_CASE("cli exit codes") {
  CHECK(run_cli({"train", "--bogus"}) == cli::usage);
  CHECK(run_cli({}) == cli::usage);
  CHECK(run_cli({"train", "--set", "nonsense=1", "--epochs", "1"}) == cli::usage);
  std::string err;
  CHECK(run_cli({"train", "--algo", "dqn", "--set", "scenario.num_ens=3", "--set", "scenario.sensors_per_en=20",
                 "--epochs", "10"},
                &err) == cli::intractable);
  CHECK(err.find("9261 joint actions exceeds") != std::string::npos);
  CHECK(run_cli({"validate-energy"}) == cli::ok);

  const fs::path dir = scratch("cli");
  CHECK(run_cli({"train", "--algo", "random", "--epochs", "30", "--set", "eval_epochs=10", "--out", dir.string(),
                 "--seed", "2"}) == cli::ok);
  CHECK(fs::exists(dir / "metrics_random_2.csv"));
  CHECK(run_cli({"eval", "--checkpoint", (dir / "checkpoint_random_2.json").string(), "--set", "eval_epochs=10",
                 "--out", dir.string()}) == cli::ok);
  CHECK(fs::exists(dir / "eval.json"));
}
