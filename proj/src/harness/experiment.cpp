#include "aoicache/harness/experiment.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "aoicache/errors.hpp"

namespace aoicache::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  }
}

std::int64_t to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
  }
}

std::uint64_t to_count(const std::string& key, const std::string& v) {
  const auto i = to_int(key, v);
  if (i < 0) throw ConfigError("'" + key + "' must be non-negative");
  return static_cast<std::uint64_t>(i);
}

std::string fmt(double d) {
  std::ostringstream os;
  os.precision(17);
  os << d;
  return os.str();
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    if constexpr (std::is_floating_point_v<T>) os << fmt(v[i]);
    else os << v[i];
  }
  return os.str();
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

struct Field {
  std::string key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define REAL_FIELD(KEY, EXPR)                                                                        \
  Field {                                                                                            \
    KEY, [](ExperimentConfig& c, const std::string& v) { c.EXPR = to_double(KEY, v); },              \
        [](const ExperimentConfig& c) { return fmt(c.EXPR); }                                        \
  }
#define INT_FIELD(KEY, EXPR)                                                                         \
  Field {                                                                                            \
    KEY, [](ExperimentConfig& c, const std::string& v) { c.EXPR = static_cast<int>(to_int(KEY, v)); }, \
        [](const ExperimentConfig& c) { return std::to_string(c.EXPR); }                             \
  }
#define COUNT_FIELD(KEY, EXPR)                                                                       \
  Field {                                                                                            \
    KEY, [](ExperimentConfig& c, const std::string& v) { c.EXPR = to_count(KEY, v); },               \
        [](const ExperimentConfig& c) { return std::to_string(c.EXPR); }                             \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      Field{"algorithm",
            [](ExperimentConfig& c, const std::string& v) { c.algorithm = agents::algorithm_from_string(v); },
            [](const ExperimentConfig& c) { return agents::to_string(c.algorithm); }},
      COUNT_FIELD("train_epochs", train_epochs),
      COUNT_FIELD("eval_epochs", eval_epochs),
      Field{"seeds", [](ExperimentConfig& c, const std::string& v) { c.seeds = parse_seed_list(v); },
            [](const ExperimentConfig& c) { return join(c.seeds); }},
      COUNT_FIELD("metrics_stride", metrics_stride),
      COUNT_FIELD("ma_window", ma_window),
      Field{"out", [](ExperimentConfig& c, const std::string& v) { c.out_dir = v; },
            [](const ExperimentConfig& c) { return c.out_dir; }},

      INT_FIELD("scenario.num_ens", scenario.num_ens),
      INT_FIELD("scenario.sensors_per_en", scenario.sensors_per_en),
      INT_FIELD("scenario.aoi_max", scenario.aoi_max),
      REAL_FIELD("scenario.content_size_min_gb", scenario.content_size_min_gb),
      REAL_FIELD("scenario.content_size_max_gb", scenario.content_size_max_gb),
      REAL_FIELD("scenario.tx_power_watts", scenario.tx_power_watts),
      REAL_FIELD("scenario.bandwidth_hz", scenario.bandwidth_hz),
      REAL_FIELD("scenario.noise_psd_dbm_hz", scenario.noise_psd_dbm_hz),
      REAL_FIELD("scenario.antenna_gain_db", scenario.antenna_gain_db),
      REAL_FIELD("scenario.shadowing_sigma_db", scenario.shadowing_sigma_db),
      REAL_FIELD("scenario.snr_threshold", scenario.snr_threshold),
      REAL_FIELD("scenario.coverage_radius_km", scenario.coverage_radius_km),
      REAL_FIELD("scenario.min_distance_km", scenario.min_distance_km),
      REAL_FIELD("scenario.omega1", scenario.weight_energy),
      REAL_FIELD("scenario.omega2", scenario.weight_traffic),
      INT_FIELD("scenario.users_per_en", scenario.users_per_en),
      Field{"scenario.skew_choices",
            [](ExperimentConfig& c, const std::string& v) {
              c.scenario.skew_choices.clear();
              for (const auto& s : split_commas(v)) c.scenario.skew_choices.push_back(to_double("scenario.skew_choices", s));
            },
            [](const ExperimentConfig& c) { return join(c.scenario.skew_choices); }},
      REAL_FIELD("scenario.rank_swap_prob", scenario.rank_swap_prob),
      REAL_FIELD("scenario.energy_unit", scenario.energy_unit),
      COUNT_FIELD("scenario.topology_seed", scenario.topology_seed),

      COUNT_FIELD("hyper.hidden", hyper.hidden),
      REAL_FIELD("hyper.q_lr", hyper.q_lr),
      REAL_FIELD("hyper.policy_lr", hyper.policy_lr),
      REAL_FIELD("hyper.alpha_lr", hyper.alpha_lr),
      REAL_FIELD("hyper.lr_power", hyper.lr_power),
      REAL_FIELD("hyper.lr_floor", hyper.lr_floor),
      COUNT_FIELD("hyper.buffer_capacity", hyper.buffer_capacity),
      COUNT_FIELD("hyper.batch_size", hyper.batch_size),
      REAL_FIELD("hyper.tau", hyper.tau),
      REAL_FIELD("hyper.gamma", hyper.gamma),
      REAL_FIELD("hyper.gs_temperature", hyper.gs_temperature),
      REAL_FIELD("hyper.gs_temperature_final", hyper.gs_temperature_final),
      REAL_FIELD("hyper.target_entropy_scale", hyper.target_entropy_scale),
      REAL_FIELD("hyper.initial_alpha", hyper.initial_alpha),
      Field{"hyper.policy_estimator",
            [](ExperimentConfig& c, const std::string& v) {
              c.hyper.policy_estimator = agents::policy_estimator_from_string(v);
            },
            [](const ExperimentConfig& c) { return agents::to_string(c.hyper.policy_estimator); }},
      REAL_FIELD("hyper.eps_start", hyper.eps_start),
      REAL_FIELD("hyper.eps_end", hyper.eps_end),
      REAL_FIELD("hyper.eps_fraction", hyper.eps_fraction),
      COUNT_FIELD("hyper.dqn_action_cap", hyper.dqn_action_cap),
  };
  return table;
}

#undef REAL_FIELD
#undef INT_FIELD
#undef COUNT_FIELD

Scale scale_from_string(const std::string& s) {
  if (s == "desk") return Scale::desk;
  if (s == "paper" || s == "full") return Scale::paper;
  throw ConfigError("unknown scale '" + s + "' (expected desk or paper)");
}

}  // namespace

env::NetworkConfig ExperimentConfig::desk_scenario() {
  env::NetworkConfig n;
  n.num_ens = 2;
  n.sensors_per_en = 5;
  return n;
}

void ExperimentConfig::validate() const {
  scenario.validate();
  hyper.validate();
  if (train_epochs == 0) throw ConfigError("train_epochs must be positive");
  if (eval_epochs == 0) throw ConfigError("eval_epochs must be positive");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (metrics_stride == 0) throw ConfigError("metrics_stride must be positive");
  if (ma_window == 0) throw ConfigError("ma_window must be positive");
}

void apply_scale(ExperimentConfig& cfg, Scale scale) {
  if (scale == Scale::desk) {
    cfg.scenario.num_ens = 2;
    cfg.scenario.sensors_per_en = 5;
    cfg.train_epochs = 20000;
    cfg.eval_epochs = 2000;
  } else {
    const env::NetworkConfig reference;
    cfg.scenario.num_ens = reference.num_ens;
    cfg.scenario.sensors_per_en = reference.sensors_per_en;
    cfg.train_epochs = 100000;
    cfg.eval_epochs = 10000;
  }
}

void set_value(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "scale") {
    apply_scale(cfg, scale_from_string(value));
    return;
  }
  for (const auto& f : fields())
    if (f.key == key) {
      f.set(cfg, value);
      return;
    }
  throw ConfigError("unknown config key '" + key + "'");
}

ExperimentConfig parse_config(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    entries.emplace_back(key, value);
  }
  ExperimentConfig cfg;
  for (const auto& [k, v] : entries)
    if (k == "scale") set_value(cfg, k, v);
  for (const auto& [k, v] : entries)
    if (k != "scale") set_value(cfg, k, v);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_overrides(ExperimentConfig& cfg, const std::vector<std::string>& assignments) {
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + a + "' is not key=value");
    set_value(cfg, trim(a.substr(0, eq)), trim(a.substr(eq + 1)));
  }
}

std::vector<std::pair<std::string, std::string>> resolved_values(const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(f.key, f.get(cfg));
  return out;
}

std::vector<std::string> known_keys() {
  std::vector<std::string> keys{"scale"};
  for (const auto& f : fields()) keys.push_back(f.key);
  return keys;
}

env::NetworkConfig training_scenario(const ExperimentConfig& cfg) {
  env::NetworkConfig n = cfg.scenario;
  if (cfg.algorithm == agents::Algorithm::age_optimal) {
    n.weight_energy = 0.0;
    n.weight_traffic = 0.0;
  }
  return n;
}

agents::Hyper training_hyper(const ExperimentConfig& cfg) {
  agents::Hyper h = cfg.hyper;
  h.total_steps = cfg.train_epochs;
  return h;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const auto& s : split_commas(text)) {
    if (s.empty()) continue;
    const auto dash = s.find('-');
    if (dash != std::string::npos && dash > 0) {
      const auto lo = to_count("seeds", s.substr(0, dash));
      const auto hi = to_count("seeds", s.substr(dash + 1));
      if (hi < lo) throw ConfigError("seed range '" + s + "' is empty");
      for (auto x = lo; x <= hi; ++x) seeds.push_back(x);
    } else {
      seeds.push_back(to_count("seeds", s));
    }
  }
  if (seeds.empty()) throw ConfigError("empty seed list");
  return seeds;
}

}  // namespace aoicache::harness
