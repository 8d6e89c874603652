#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "gridswitch/network.hpp"

namespace gridswitch {

/// Case document schema:
///   { "base_mva": number, "slack_bus": int,
///     "buses":      [{"id": int, "load_mw": number}],
///     "branches":   [{"from": int, "to": int, "x_pu": number, "rating_mw": number}],
///     "generators": [{"id": int, "bus": int, "pmin_mw": number, "pmax_mw": number,
///                     "cost_per_mwh": number}] }
/// Branch ordinal = 1-based array position. Branches accept an optional
/// "in_service" flag (default true); serialize_case writes it only when false.
Network load_case(const nlohmann::json& doc);
Network load_case_file(const std::string& path);
nlohmann::json serialize_case(const Network& net);

/// Load-override file: CSV `bus,load_mw`, one row per bus; a header row and
/// blank lines are skipped.
std::map<int, double> load_profile_csv(const std::string& path);
std::map<int, double> parse_profile_csv(const std::string& text);

}  // namespace gridswitch
