#pragma once

#include <vector>

#include "gridswitch/report.hpp"
#include "gridswitch/switching.hpp"

namespace gridswitch {

struct ScreeningRow {
    ContingencySpec contingency;
    bool islanded = false;
    double level1_shed_mw = 0.0;
    int violation_count_fixed = 0;
    bool needs_level2 = false;
};

struct ScreenConfig {
    double shed_tol_mw = 1e-3;
    double shed_weight = 10000.0;
};

/// One row per in-service branch and per generator. Islanding branch outages
/// are marked and skipped from dispatch. Rows come back sorted by level-1 shed
/// descending (islanded rows after dispatched rows of equal shed, branches
/// before generators, then by element id).
std::vector<ScreeningRow> screen_n1(const Network& net, const ScreenConfig& cfg);

std::string screen_to_csv(const std::vector<ScreeningRow>& rows);
std::string screen_to_table(const std::vector<ScreeningRow>& rows);
nlohmann::json screen_to_json(const std::vector<ScreeningRow>& rows);

/// Scenario A: shedding without upward re-dispatch. Non-slack generators are
/// capped at the pre-contingency optimum; slack-bus units stay dispatchable.
ScenarioReport run_scenario_a(const Network& net, const ContingencySpec& contingency,
                              const BilevelConfig& cfg);
/// Scenario B: shedding with full generator re-dispatch (the level-1 solve).
ScenarioReport run_scenario_b(const Network& net, const ContingencySpec& contingency,
                              const BilevelConfig& cfg);
/// Scenario C: complete-enumeration switching with re-dispatch. Not switching
/// at all is kept as the fallback, so the row never exceeds scenario B.
ScenarioReport run_scenario_c(const Network& net, const ContingencySpec& contingency,
                              const BilevelConfig& cfg);

struct PipelineResult {
    std::vector<ScenarioReport> rows;  // A, B, C, bilevel
    BilevelReport bilevel;
};

PipelineResult run_full_pipeline(const Network& net, const ContingencySpec& contingency,
                                 const BilevelConfig& cfg);

}  // namespace gridswitch
