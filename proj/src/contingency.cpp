#include "gridswitch/contingency.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "gridswitch/errors.hpp"

namespace gridswitch {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

DispatchSolution solve_level1(const Network& net, double shed_weight) {
    DispatchProblem dp(net);
    dp.allow_redispatch = true;
    dp.shed_weight = shed_weight;
    dp.enforce_limits = true;
    return solve_dispatch(dp);
}

DispatchSolution base_dispatch(const Network& net, double shed_weight) {
    const DispatchSolution base = solve_level1(net, shed_weight);
    if (base.status != DispatchStatus::optimal) {
        throw AnalysisError("infeasible base case");
    }
    return base;
}

}  // namespace

std::vector<ScreeningRow> screen_n1(const Network& net, const ScreenConfig& cfg) {
    if (!net.connected()) throw AnalysisError("disconnected network");
    const DispatchSolution base = base_dispatch(net, cfg.shed_weight);
    // Fixed-injection snapshots keep loads unshed.
    const std::vector<double> base_inj = injections_from_dispatch(net, base.gen_mw);

    std::vector<ScreeningRow> rows;
    for (const Branch& br : net.branches()) {
        if (!br.in_service) continue;
        ScreeningRow row;
        row.contingency = {ContingencySpec::Kind::branch, br.id};
        const Network net_o = apply_branch_outage(net, br.id);
        if (!net_o.connected()) {
            row.islanded = true;
            rows.push_back(row);
            continue;
        }
        const DispatchSolution lvl1 = solve_level1(net_o, cfg.shed_weight);
        row.level1_shed_mw = lvl1.status == DispatchStatus::optimal
                                 ? lvl1.total_shed_mw
                                 : std::numeric_limits<double>::infinity();
        row.needs_level2 = row.level1_shed_mw > cfg.shed_tol_mw;
        row.violation_count_fixed = static_cast<int>(
            violation_check(dc_power_flow_slack_balanced(net_o, base_inj), net_o).size());
        rows.push_back(row);
    }
    for (const Generator& g : net.generators()) {
        ScreeningRow row;
        row.contingency = {ContingencySpec::Kind::generator, g.id};
        const Network net_o = apply_generator_outage(net, g.id);
        const DispatchSolution lvl1 = solve_level1(net_o, cfg.shed_weight);
        row.level1_shed_mw = lvl1.status == DispatchStatus::optimal
                                 ? lvl1.total_shed_mw
                                 : std::numeric_limits<double>::infinity();
        row.needs_level2 = row.level1_shed_mw > cfg.shed_tol_mw;
        // Lost generation lands on the slack bus in the fixed-injection view.
        std::vector<double> inj = base_inj;
        for (size_t i = 0; i < net.generators().size(); ++i) {
            if (net.generators()[i].id == g.id) {
                inj[net.bus_index(g.bus)] -= base.gen_mw[i];
            }
        }
        row.violation_count_fixed =
            static_cast<int>(violation_check(dc_power_flow_slack_balanced(net_o, inj), net_o).size());
        rows.push_back(row);
    }

    std::sort(rows.begin(), rows.end(), [](const ScreeningRow& a, const ScreeningRow& b) {
        if (a.level1_shed_mw != b.level1_shed_mw) return a.level1_shed_mw > b.level1_shed_mw;
        if (a.islanded != b.islanded) return !a.islanded;
        if (a.contingency.kind != b.contingency.kind) {
            return a.contingency.kind == ContingencySpec::Kind::branch;
        }
        return a.contingency.element_id < b.contingency.element_id;
    });
    return rows;
}

std::string screen_to_csv(const std::vector<ScreeningRow>& rows) {
    std::ostringstream out;
    out << "contingency,islanded,level1_shed_mw,violations_fixed,needs_level2\n";
    for (const ScreeningRow& r : rows) {
        out << r.contingency.label() << ',' << (r.islanded ? "true" : "false") << ','
            << (r.islanded ? "" : fmt_fixed(r.level1_shed_mw, 4)) << ','
            << (r.islanded ? "" : std::to_string(r.violation_count_fixed)) << ','
            << (r.needs_level2 ? "true" : "false") << '\n';
    }
    return out.str();
}

std::string screen_to_table(const std::vector<ScreeningRow>& rows) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-14s %9s %15s %12s %13s\n", "contingency", "islanded",
                  "level1_shed_mw", "viol_fixed", "needs_level2");
    out << line;
    for (const ScreeningRow& r : rows) {
        std::snprintf(line, sizeof(line), "%-14s %9s %15s %12s %13s\n",
                      r.contingency.label().c_str(), r.islanded ? "yes" : "no",
                      r.islanded ? "-" : fmt_fixed(r.level1_shed_mw, 4).c_str(),
                      r.islanded ? "-" : std::to_string(r.violation_count_fixed).c_str(),
                      r.needs_level2 ? "yes" : "no");
        out << line;
    }
    return out.str();
}

nlohmann::json screen_to_json(const std::vector<ScreeningRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const ScreeningRow& r : rows) {
        nlohmann::json j;
        j["contingency"] = r.contingency.label();
        j["islanded"] = r.islanded;
        if (r.islanded) {
            j["level1_shed_mw"] = nullptr;
            j["violations_fixed"] = nullptr;
        } else {
            j["level1_shed_mw"] = r.level1_shed_mw;
            j["violations_fixed"] = r.violation_count_fixed;
        }
        j["needs_level2"] = r.needs_level2;
        arr.push_back(std::move(j));
    }
    return arr;
}

ScenarioReport run_scenario_a(const Network& net, const ContingencySpec& contingency,
                              const BilevelConfig& cfg) {
    const auto t0 = Clock::now();
    const DispatchSolution base = base_dispatch(net, cfg.shed_weight);
    const Network net_post = apply_contingency(net, contingency);

    std::map<int, double> fixed = fixed_outputs(net, base, net.slack_bus());
    if (contingency.kind == ContingencySpec::Kind::generator) {
        fixed.erase(contingency.element_id);
    }
    DispatchProblem dp(net_post);
    dp.allow_redispatch = false;
    dp.fixed_gen_mw = std::move(fixed);
    dp.shed_weight = cfg.shed_weight;
    dp.enforce_limits = true;
    const DispatchSolution sol = solve_dispatch(dp);
    if (sol.status != DispatchStatus::optimal) {
        throw AnalysisError("scenario A infeasible for " + contingency.label());
    }
    ScenarioReport row;
    row.label = "A";
    row.total_shed_mw = sol.total_shed_mw;
    row.violation_count = static_cast<int>(violation_check(sol.flows_mw, net_post).size());
    row.wall_time_s = seconds_since(t0);
    return row;
}

ScenarioReport run_scenario_b(const Network& net, const ContingencySpec& contingency,
                              const BilevelConfig& cfg) {
    const auto t0 = Clock::now();
    const Network net_post = apply_contingency(net, contingency);
    const DispatchSolution sol = solve_level1(net_post, cfg.shed_weight);
    if (sol.status != DispatchStatus::optimal) {
        throw AnalysisError("scenario B infeasible for " + contingency.label());
    }
    ScenarioReport row;
    row.label = "B";
    row.total_shed_mw = sol.total_shed_mw;
    row.violation_count = static_cast<int>(violation_check(sol.flows_mw, net_post).size());
    row.wall_time_s = seconds_since(t0);
    return row;
}

ScenarioReport run_scenario_c(const Network& net, const ContingencySpec& contingency,
                              const BilevelConfig& cfg) {
    const auto t0 = Clock::now();
    const Network net_post = apply_contingency(net, contingency);
    const DispatchSolution no_switch = solve_level1(net_post, cfg.shed_weight);
    if (no_switch.status != DispatchStatus::optimal) {
        throw AnalysisError("scenario C infeasible for " + contingency.label());
    }
    const std::vector<CandidateEvaluation> evals =
        complete_enumeration(net_post, EnumerationMode::redispatch, cfg);

    double best = std::numeric_limits<double>::infinity();
    for (const CandidateEvaluation& ev : evals) {
        if (ev.status == EvalStatus::optimal) best = std::min(best, *ev.total_shed_mw);
    }
    ScenarioReport row;
    row.label = "C";
    if (best <= no_switch.total_shed_mw) {
        row.total_shed_mw = best;
        for (const CandidateEvaluation& ev : evals) {
            if (ev.status == EvalStatus::optimal && *ev.total_shed_mw <= best + 1e-9) {
                row.best_candidates.push_back(ev.branch_id);
            }
        }
        std::sort(row.best_candidates.begin(), row.best_candidates.end());
    } else {
        row.total_shed_mw = no_switch.total_shed_mw;  // switching would only hurt
    }
    row.violation_count = 0;
    row.wall_time_s = seconds_since(t0);
    return row;
}

PipelineResult run_full_pipeline(const Network& net, const ContingencySpec& contingency,
                                 const BilevelConfig& cfg) {
    PipelineResult result;
    result.rows.push_back(run_scenario_a(net, contingency, cfg));
    result.rows.push_back(run_scenario_b(net, contingency, cfg));
    result.rows.push_back(run_scenario_c(net, contingency, cfg));

    const auto t0 = Clock::now();
    result.bilevel = run_bilevel(net, contingency, cfg);
    ScenarioReport row;
    row.label = "bilevel";
    row.total_shed_mw =
        result.bilevel.best_shed_mw ? *result.bilevel.best_shed_mw : result.bilevel.level1_shed_mw;
    row.violation_count = 0;
    for (const CandidateEvaluation& ev : result.bilevel.candidates) {
        if (result.bilevel.best_shed_mw && ev.status == EvalStatus::optimal &&
            *ev.total_shed_mw <= *result.bilevel.best_shed_mw + 1e-9) {
            row.violation_count = std::max(row.violation_count, ev.violation_count);
        }
    }
    row.best_candidates = result.bilevel.best;
    row.wall_time_s = seconds_since(t0);
    result.rows.push_back(row);
    return result;
}

}  // namespace gridswitch
