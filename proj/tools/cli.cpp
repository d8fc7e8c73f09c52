#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iomanip>

#include "aoicache/checks/oracles.hpp"
#include "aoicache/checks/suites.hpp"
#include "aoicache/env/channel.hpp"
#include "aoicache/errors.hpp"
#include "aoicache/harness/runner.hpp"
#include "aoicache/nncore/checkpoint.hpp"

namespace aoicache::cli {

namespace {

struct CommonOptions {
  std::string config;
  std::string seeds;
  std::string out;
  std::string algo;
  std::uint64_t epochs = 0;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "Key-value config file (dotted keys)");
  cmd->add_option("--seed", o.seeds, "Seed or comma list / range of seeds, e.g. 1,2,3 or 1-5");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--algo", o.algo, "madsac_cc | madsac_dc | dqn | ac | random | age_optimal");
  cmd->add_option("--epochs", o.epochs, "Training epochs");
  cmd->add_option("--set", o.sets, "Override a config key: --set key=value (repeatable)");
}

harness::ExperimentConfig resolve(const CommonOptions& o) {
  harness::ExperimentConfig cfg = o.config.empty() ? harness::ExperimentConfig{} : harness::load_config(o.config);
  harness::apply_overrides(cfg, o.sets);
  if (!o.seeds.empty()) cfg.seeds = harness::parse_seed_list(o.seeds);
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (!o.algo.empty()) cfg.algorithm = agents::algorithm_from_string(o.algo);
  if (o.epochs > 0) cfg.train_epochs = o.epochs;
  cfg.validate();
  return cfg;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--values expects comma-separated numbers, got '" + item + "'");
    }
  }
  if (values.empty()) throw ConfigError("--values is empty");
  return values;
}

int cmd_train(const CommonOptions& o, std::ostream& out) {
  const harness::ExperimentConfig cfg = resolve(o);
  for (auto seed : cfg.seeds) {
    const harness::TrainingResult r = harness::run_training(cfg, seed);
    out << "train " << agents::to_string(cfg.algorithm) << " seed " << seed << ": final moving-average reward "
        << harness::format_number(r.final_ma_reward);
    if (!r.metrics_path.empty()) out << " (metrics " << r.metrics_path << ", checkpoint " << r.checkpoint_path << ")";
    out << '\n';
  }
  return ExitCode::ok;
}

int cmd_eval(const CommonOptions& o, const std::string& checkpoint, std::ostream& out) {
  const harness::ExperimentConfig cfg = resolve(o);
  nlohmann::json report = nlohmann::json::array();
  for (auto seed : cfg.seeds) {
    const harness::EvalResult r = harness::run_evaluation(checkpoint, cfg, seed);
    nlohmann::json j = harness::eval_to_json(r);
    j["seed"] = seed;
    report.push_back(j);
    out << "eval seed " << seed << ": cost " << harness::format_number(r.mean_cost) << " (aoi "
        << harness::format_number(r.mean_aoi) << ", energy " << harness::format_number(r.mean_energy) << ", traffic "
        << harness::format_number(r.mean_traffic) << ") over " << r.epochs << " epochs\n";
  }
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    nn::save_json((std::filesystem::path(cfg.out_dir) / "eval.json").string(), report);
  }
  return ExitCode::ok;
}

int cmd_sweep(const CommonOptions& o, const std::string& param, const std::string& values, std::ostream& out) {
  const harness::ExperimentConfig cfg = resolve(o);
  const harness::SweepResult r =
      harness::run_sweep(cfg, harness::sweep_param_from_string(param), parse_values(values));
  int failed = 0;
  for (const auto& c : r.cells)
    if (!c.ok) ++failed;
  for (double v : r.values)
    out << param << " = " << harness::format_number(v) << ": cost " << harness::format_number(r.seed_mean(v, "cost"))
        << ", aoi " << harness::format_number(r.seed_mean(v, "aoi")) << ", energy "
        << harness::format_number(r.seed_mean(v, "energy")) << ", traffic "
        << harness::format_number(r.seed_mean(v, "traffic")) << '\n';
  if (failed > 0) out << failed << " of " << r.cells.size() << " cells failed (see the sweep CSV)\n";
  return failed == static_cast<int>(r.cells.size()) ? ExitCode::failure : ExitCode::ok;
}

int cmd_validate_energy(std::ostream& out) {
  const double etas[] = {1.0, 10.0, 100.0};
  double worst = 0.0;
  out << std::setw(12) << "beta" << std::setw(8) << "eta" << std::setw(16) << "rel_error" << '\n';
  for (int i = 0; i < 50; ++i) {
    const double beta = std::pow(10.0, -2.0 + 6.0 * i / 49.0);
    const double eta = etas[i % 3];
    const double err = std::abs(std::expm1(checks::log_throughput_by_quadrature(beta, eta, 1e7) -
                                           env::log_expected_throughput(beta, eta, 1e7)));
    worst = std::max(worst, err);
    out << std::setw(12) << std::setprecision(4) << beta << std::setw(8) << eta << std::setw(16)
        << std::setprecision(3) << std::scientific << err << std::defaultfloat << '\n';
  }
  out << "max relative error vs quadrature oracle: " << std::scientific << std::setprecision(3) << worst
      << std::defaultfloat << (worst < 1e-6 ? " (ok)" : " (ABOVE 1e-6)") << '\n';
  return worst < 1e-6 ? ExitCode::ok : ExitCode::failure;
}

int cmd_selftest(std::ostream& out) {
  int failed = 0;
  for (const auto& r : {checks::check_gumbel_max_fidelity(), checks::check_gs_consistency(),
                        checks::check_gradients(), checks::check_soft_policy_improvement()}) {
    checks::print_result(out, r);
    if (!r.passed) ++failed;
  }
  return failed == 0 ? ExitCode::ok : ExitCode::failure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Edge caching of transient IoT content with multi-agent soft actor-critic", "aoicache"};
  app.require_subcommand(1);
  CommonOptions train_o, eval_o, sweep_o;
  std::string checkpoint, param, values;

  auto* train = app.add_subcommand("train", "Train one algorithm on every configured seed");
  add_common(train, train_o);
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  add_common(eval, eval_o);
  eval->add_option("--checkpoint", checkpoint, "Checkpoint JSON written by train")->required();
  auto* sweep = app.add_subcommand("sweep", "Train and evaluate across values of one parameter");
  add_common(sweep, sweep_o);
  sweep->add_option("--param", param, "num_ens | sensors_per_en | omega1 | omega2")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();
  auto* validate = app.add_subcommand("validate-energy", "Cross-check the energy model against quadrature");
  auto* selftest = app.add_subcommand("selftest", "Run sampler and gradient property suites");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ExitCode::ok : ExitCode::usage;
  }

  try {
    if (train->parsed()) return cmd_train(train_o, out);
    if (eval->parsed()) return cmd_eval(eval_o, checkpoint, out);
    if (sweep->parsed()) return cmd_sweep(sweep_o, param, values, out);
    if (validate->parsed()) return cmd_validate_energy(out);
    if (selftest->parsed()) return cmd_selftest(out);
  } catch (const IntractableError& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::intractable;
  } catch (const DivergenceError& e) {
    err << "error: training diverged: " << e.what() << '\n';
    return ExitCode::divergence;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return ExitCode::usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::failure;
  }
  return ExitCode::usage;
}

}  // namespace aoicache::cli
