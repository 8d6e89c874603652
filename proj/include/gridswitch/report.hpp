#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "gridswitch/sensitivity.hpp"
#include "gridswitch/switching.hpp"

namespace gridswitch {

/// One comparison-table row: a method or scenario with its achieved shed,
/// remaining violations, wall time and best switching candidates.
struct ScenarioReport {
    std::string label;
    double total_shed_mw = 0.0;
    int violation_count = 0;
    double wall_time_s = 0.0;
    std::vector<int> best_candidates;

    bool operator==(const ScenarioReport&) const = default;
};

enum class OutputFormat { table, json, csv };

/// CSV columns: method,load_shed_mw,violations,time_s,best_candidates.
/// JSON: array of ScenarioReport objects. Table: human-aligned fixed columns.
std::string emit_table(const std::vector<ScenarioReport>& rows, OutputFormat format);

nlohmann::json to_json(const ScenarioReport& row);
nlohmann::json to_json(const std::vector<ScenarioReport>& rows);
ScenarioReport scenario_from_json(const nlohmann::json& j);
std::vector<ScenarioReport> scenarios_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CandidateEvaluation& ev);
nlohmann::json to_json(const BilevelReport& report, bool include_timings);

std::string evaluations_to_csv(const std::vector<CandidateEvaluation>& evals);
std::string evaluations_to_table(const std::vector<CandidateEvaluation>& evals);

std::string ptdf_to_csv(const PtdfMatrix& ptdf, const Network& net);
std::string lodf_to_csv(const LodfMatrix& lodf);

/// Fixed-point formatting with "-0" normalized away; the single formatting
/// path keeps byte-identical output across runs.
std::string fmt_fixed(double value, int precision);
std::string join_ids(const std::vector<int>& ids, char sep = ';');

}  // namespace gridswitch
