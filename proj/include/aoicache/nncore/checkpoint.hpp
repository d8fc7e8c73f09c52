#pragma once

#include <filesystem>

#include <json.hpp>

#include "aoicache/nncore/mlp.hpp"

namespace aoicache::nn {

inline constexpr int kCheckpointVersion = 1;

/// {"format":"mlp","version":1,"layer_sizes":[...],"params":[...]}
nlohmann::json mlp_to_json(const Mlp& net);

/// Throws ConfigError on a wrong format tag, version, or parameter count.
Mlp mlp_from_json(const nlohmann::json& j);

void save_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json load_json(const std::filesystem::path& path);

}  // namespace aoicache::nn
