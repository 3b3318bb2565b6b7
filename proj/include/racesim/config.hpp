#pragma once

#include <string>

#include "racesim/env.hpp"

namespace racesim {

/// CLI rollout settings; the `run` section of a config file. Command-line
/// flags override these.
struct RunSettings {
  std::int64_t steps = 0;  // 0: episode_steps * episodes
  int episodes = 1;
  std::string policy = "hover";  // hover | max-thrust | file
  std::string actions;           // action file for the file policy
  std::string out;               // replay path; empty disables logging
  int batch = 1;
  double duration = 2.0;  // bench seconds per mode
  int workers = 0;        // 0: one per hardware thread

  bool operator==(const RunSettings&) const = default;
};

struct ConfigFile {
  EnvConfig env;
  RunSettings run;
  bool operator==(const ConfigFile&) const = default;
};

ConfigFile parse_config_file(const std::string& text, const std::string& base_dir = "");
ConfigFile load_config_file(const std::string& path);
std::string emit_config_file(const ConfigFile& config);

/// Parses a YAML env config. Missing keys keep their defaults, so an empty
/// document yields the nominal setup. Unknown keys and bad values raise
/// ConfigError naming the offending field. A relative track path is resolved
/// against `base_dir` when it is non-empty.
EnvConfig parse_env_config(const std::string& text, const std::string& base_dir = "");
EnvConfig load_env_config(const std::string& path);

/// Emits every field; parse_env_config(emit_env_config(c)) == c.
std::string emit_env_config(const EnvConfig& config);

}  // namespace racesim
