#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "aoicache/agents/hyper.hpp"
#include "aoicache/agents/learner.hpp"
#include "aoicache/env/config.hpp"

namespace aoicache::harness {

enum class Scale { desk, paper };

/// Everything one experiment needs. Defaults are the desk-scale settings;
/// apply_scale(Scale::paper) restores the reference deployment.
struct ExperimentConfig {
  env::NetworkConfig scenario = desk_scenario();
  agents::Algorithm algorithm = agents::Algorithm::madsac_cc;
  agents::Hyper hyper;
  std::uint64_t train_epochs = 20000;
  std::uint64_t eval_epochs = 2000;
  std::vector<std::uint64_t> seeds{1};
  std::size_t metrics_stride = 1;
  std::size_t ma_window = 5000;
  std::string out_dir;

  static env::NetworkConfig desk_scenario();
  /// Throws ConfigError on any invalid field.
  void validate() const;
};

void apply_scale(ExperimentConfig& cfg, Scale scale);

/// Sets one dotted key (e.g. "scenario.num_ens", "hyper.q_lr", "seeds").
/// Throws ConfigError for unknown keys or unparsable values.
void set_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Parses "key = value" lines ('#' starts a comment). A "scale" key, if
/// present, is applied before every other key regardless of its position.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Applies "key=value" overrides in order.
void apply_overrides(ExperimentConfig& cfg, const std::vector<std::string>& assignments);

/// Every key with its resolved value, in a stable order.
std::vector<std::pair<std::string, std::string>> resolved_values(const ExperimentConfig& cfg);
std::vector<std::string> known_keys();

/// The learning environment for an experiment: the age_optimal baseline
/// trains with both cost weights zeroed.
env::NetworkConfig training_scenario(const ExperimentConfig& cfg);

/// Hyperparameters with the decay horizon tied to the training length.
agents::Hyper training_hyper(const ExperimentConfig& cfg);

std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace aoicache::harness
