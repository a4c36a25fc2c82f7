#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "ptt/model.hpp"

namespace ptt {

enum class Scenario { blowup, global, linear, verify };

std::string to_string(Scenario s);

struct ScenarioConfig {
  Scenario scenario = Scenario::verify;
  int n = 32;
  double dt = 1e-3;
  double t_max = 1.0;
  double delta0 = 0.02;
  std::optional<double> c0;  // global lower trace bound, δ₀/2 when absent
  double eps_tilde0 = 1.0;
  double eps = 0.1;
  ModelParams params = ModelParams::preset();
  std::uint64_t seed = 1;
  double record_interval = 0.05;
  std::string output_dir = "out";
  // Extensions beyond the core keys.
  double trace_min = -2.0;  // min trτ₀ of the blowup data
  double cfl_target = 0.4;
  double blowup_threshold = 1e6;
  double dt_min = 1e-9;
  int particles = 64;
};

/// Raw key=value entries with the line each came from (0 for the command line).
struct ConfigEntry {
  std::string value;
  int line = 0;
};
using ConfigEntries = std::map<std::string, ConfigEntry>;

/// Splits key=value lines, dropping blank lines and '#' comments. Rejects unknown keys, lines
/// without '=', and repeated keys.
ConfigEntries parse_config_entries(std::string_view text);

/// Typed config with defaults for missing keys; validates ranges. The scenario key is mandatory.
ScenarioConfig build_config(const ConfigEntries& entries);

/// parse_config_entries followed by build_config. Throws ConfigError naming key and line.
ScenarioConfig parse_config(std::string_view text);

/// key=value lines that parse back to the same config.
std::string echo_config(const ScenarioConfig& cfg);

}  // namespace ptt
