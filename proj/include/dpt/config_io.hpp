#pragma once

#include "dpt/model.hpp"
#include "dpt/policy.hpp"

#include "json.hpp"

#include <string>

namespace dpt {

/// Parses the JSON configuration:
///   { "Q": int, "S": int,
///     "arrival": {"A": int, "mode": "matrix", "gamma": [[..]]}
///              | {"A": int, "mode": "zeta_psi", "zeta": [..], "psi": int}
///              | {"A": 3, "mode": "kappa_pattern", "pattern": 1|2|3, "kappa": real},
///     "channel": {"amplitudes": [..], "eta": [..]},
///     "power": {"mode": "table", "table": [[..]]} | {"mode": "awgn_scaled", "base": [..]} }
/// Throws ConfigError naming the line (syntax) or the field (content).
SystemConfig parse_config(const std::string& text);
SystemConfig load_config(const std::string& path);

/// {"Q","A","L","S","order":"s-major","thresholds":[..],"boundary":null|{"s","a","iota","p"}}
nlohmann::json policy_to_json(const ThresholdPolicy& tp);
ThresholdPolicy policy_from_json(const nlohmann::json& j, const SystemConfig& cfg);
ThresholdPolicy load_policy(const std::string& path, const SystemConfig& cfg);

std::string read_file(const std::string& path);

} // namespace dpt
