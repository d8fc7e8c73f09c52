#include "aoicache/nncore/checkpoint.hpp"

#include <fstream>

#include "aoicache/errors.hpp"

namespace aoicache::nn {

nlohmann::json mlp_to_json(const Mlp& net) {
  return {{"format", "mlp"},
          {"version", kCheckpointVersion},
          {"layer_sizes", net.layer_sizes()},
          {"params", net.params().flatten()}};
}

Mlp mlp_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "mlp") throw ConfigError("checkpoint entry is not an mlp");
  if (j.value("version", 0) != kCheckpointVersion)
    throw ConfigError("unsupported mlp checkpoint version " + std::to_string(j.value("version", 0)));
  Mlp net(j.at("layer_sizes").get<std::vector<std::size_t>>());
  const auto flat = j.at("params").get<std::vector<double>>();
  net.params().unflatten(flat);
  return net;
}

void save_json(const std::filesystem::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(1) << '\n';
}

nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed json in " + path.string() + ": " + e.what());
  }
}

}  // namespace aoicache::nn
