#pragma once

#include <string>

#include "windesign/scenario.hpp"

#include "json.hpp"

namespace windesign {

// JSON <-> ScenarioSpec. Parsing validates shape and values and throws
// ConfigError with a JSON-pointer-style path ("/endpoints/1/control/rate").
ScenarioSpec scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const ScenarioSpec& spec);

// Reads and parses a config file; wraps parse errors in ConfigError.
ScenarioSpec load_scenario_file(const std::string& path);

// Embedded JSON Schema (draft-07) describing the accepted config document.
const char* scenario_schema_json();
const char* scenario_schema_id();  // "windesign-scenario/v1"

// FNV-1a over a canonical (sorted-key, fixed-format) dump of the config, as a
// 16-hex-digit string. Stamped on every output row so results can be traced
// back to the exact inputs.
std::string config_hash(const nlohmann::json& j);

}  // namespace windesign
