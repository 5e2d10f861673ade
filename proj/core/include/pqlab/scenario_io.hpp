#pragma once

#include "pqlab/model.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace pqlab::io {

/// Scenario document schema:
///
///   {
///     "classes": [{"arrival_rate": 0.3, "accumulation_rate": 3}, ...],
///     "service_rate": 1,
///     "rate_schedule": [{"start": 0, "rates": [0.3, 0.3, 0.3]}, ...],      (optional)
///     "policy_schedule": [{"start": 0, "kind": "accumulating"}, ...],
///     "horizon": 1e6,
///     "seed": 42,
///     "sample_interval": 100
///   }
///
/// Policy kinds: "static", "accumulating",
/// "scaled_accumulating" (epsilon, base_rates, static_tail_count = 1),
/// "hybrid_lex" (static_prefix).
///
/// Structural problems throw ValidationError naming the offending key path;
/// the semantic checks of validate() are applied by the caller.
ScenarioSpec parse_scenario(const nlohmann::json& doc);

/// Parses text; syntax errors report line and column.
ScenarioSpec parse_scenario_text(std::string_view text, const std::string& source_name = "<string>");

/// Reads and parses a file. Throws IoError when it cannot be read.
ScenarioSpec load_scenario(const std::filesystem::path& path);

nlohmann::json to_json(const ScenarioSpec& spec);
nlohmann::json to_json(const PolicySpec& policy);

} // namespace pqlab::io
