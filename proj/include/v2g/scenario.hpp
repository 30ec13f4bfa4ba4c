#pragma once

#include <string>

#include <json.hpp>

#include "v2g/powertrain.hpp"

namespace v2g {

/// Parses and fully validates a scenario file (JSON). Unknown keys anywhere
/// are hard errors; every diagnostic carries the offending field path, e.g.
/// "mpc.N_c". Throws ConfigError (bad content) or IoError (unreadable file).
Scenario parse_scenario(const std::string& path);

/// Same, from an already-loaded JSON document.
Scenario parse_scenario_json(const nlohmann::ordered_json& j);

/// Canonical JSON form; parse_scenario_json(serialize_scenario(sc))
/// reproduces sc exactly.
nlohmann::ordered_json serialize_scenario(const Scenario& sc);

void save_scenario(const Scenario& sc, const std::string& path);

/// The bundled default scenario, constructed in code. The shipped
/// default.scenario file parses to exactly this value.
Scenario default_scenario();

}  // namespace v2g
