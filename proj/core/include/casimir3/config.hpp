#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "casimir3/system_config.hpp"

namespace casimir3 {

// JSON configuration with unit-suffixed keys (_hz, _nm, _um, _k, _n, ...).
// Frequencies given in Hz are converted to rad/s (ω = 2πf). Unknown keys
// and invariant violations raise ConfigError naming the key path.
// Relative file references resolve against `base_dir`.
SystemConfig config_from_json(const nlohmann::json& j,
                              const std::filesystem::path& base_dir = {});
SystemConfig load_config(const std::filesystem::path& path);

// Snapshot in the same format; resonant frequencies appear as numbers once
// resolved.
nlohmann::json config_to_json(const SystemConfig& config);

const char* to_string(SweepParameter p);
SweepParameter parse_sweep_parameter(const std::string& name);

}  // namespace casimir3
