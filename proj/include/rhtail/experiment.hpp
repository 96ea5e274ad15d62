#pragma once

#include <string>

#include "json.hpp"

namespace rhtail {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Validates the config against the schema; throws ConfigError with a
/// pointer-anchored diagnostic on violation.
void validate_config(const nlohmann::json& config, const std::string& source_name);

/// Runs one experiment and returns the report. Deterministic: same config and
/// seed produce byte-identical dumps. Per-ball CSV tables are written next to
/// the report when out_dir is nonempty.
nlohmann::json run_experiment(const nlohmann::json& config, const std::string& out_dir);

/// Human-readable description of the accepted config layout.
std::string config_schema_text();

}  // namespace rhtail
