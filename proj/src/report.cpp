#include "gridswitch/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "gridswitch/errors.hpp"

namespace gridswitch {

using nlohmann::json;

std::string fmt_fixed(double value, int precision) {
    if (value == 0.0) value = 0.0;  // collapse negative zero
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, value);
    return buf;
}

std::string join_ids(const std::vector<int>& ids, char sep) {
    std::string out;
    for (size_t i = 0; i < ids.size(); ++i) {
        if (i) out.push_back(sep);
        out += std::to_string(ids[i]);
    }
    return out;
}

std::string emit_table(const std::vector<ScenarioReport>& rows, OutputFormat format) {
    if (rows.empty()) throw ValidationError("no rows to emit");
    std::ostringstream out;
    switch (format) {
        case OutputFormat::csv: {
            out << "method,load_shed_mw,violations,time_s,best_candidates\n";
            for (const ScenarioReport& r : rows) {
                out << r.label << ',' << fmt_fixed(r.total_shed_mw, 4) << ','
                    << r.violation_count << ',' << fmt_fixed(r.wall_time_s, 3) << ','
                    << join_ids(r.best_candidates) << '\n';
            }
            break;
        }
        case OutputFormat::json: {
            out << to_json(rows).dump(2) << '\n';
            break;
        }
        case OutputFormat::table: {
            size_t label_w = 8;
            for (const ScenarioReport& r : rows) label_w = std::max(label_w, r.label.size() + 2);
            char line[256];
            std::snprintf(line, sizeof(line), "%-*s %14s %11s %9s  %s\n",
                          static_cast<int>(label_w), "method", "load_shed_mw", "violations",
                          "time_s", "best_candidates");
            out << line;
            for (const ScenarioReport& r : rows) {
                std::snprintf(line, sizeof(line), "%-*s %14s %11d %9s  %s\n",
                              static_cast<int>(label_w), r.label.c_str(),
                              fmt_fixed(r.total_shed_mw, 4).c_str(), r.violation_count,
                              fmt_fixed(r.wall_time_s, 3).c_str(),
                              join_ids(r.best_candidates, ',').c_str());
                out << line;
            }
            break;
        }
    }
    return out.str();
}

json to_json(const ScenarioReport& row) {
    return json{{"label", row.label},
                {"total_shed_mw", row.total_shed_mw},
                {"violation_count", row.violation_count},
                {"wall_time_s", row.wall_time_s},
                {"best_candidates", row.best_candidates}};
}

json to_json(const std::vector<ScenarioReport>& rows) {
    json arr = json::array();
    for (const ScenarioReport& r : rows) arr.push_back(to_json(r));
    return arr;
}

ScenarioReport scenario_from_json(const json& j) {
    ScenarioReport r;
    r.label = j.at("label").get<std::string>();
    r.total_shed_mw = j.at("total_shed_mw").get<double>();
    r.violation_count = j.at("violation_count").get<int>();
    r.wall_time_s = j.at("wall_time_s").get<double>();
    r.best_candidates = j.at("best_candidates").get<std::vector<int>>();
    return r;
}

std::vector<ScenarioReport> scenarios_from_json(const json& j) {
    std::vector<ScenarioReport> rows;
    for (const json& item : j) rows.push_back(scenario_from_json(item));
    return rows;
}

json to_json(const CandidateEvaluation& ev) {
    json j;
    j["branch"] = ev.branch_id;
    j["lodf_score"] = ev.lodf_score ? json(*ev.lodf_score) : json(nullptr);
    j["shed_mw"] = ev.total_shed_mw ? json(*ev.total_shed_mw) : json(nullptr);
    j["violations"] = ev.violation_count;
    j["islanding"] = ev.islanding;
    switch (ev.status) {
        case EvalStatus::optimal: j["status"] = "optimal"; break;
        case EvalStatus::infeasible: j["status"] = "infeasible"; break;
        case EvalStatus::skipped: j["status"] = "skipped"; break;
    }
    return j;
}

json to_json(const BilevelReport& report, bool include_timings) {
    json j;
    j["contingency"] = report.contingency.label();
    j["early_exit"] = report.early_exit;
    j["level1_shed_mw"] = report.level1_shed_mw;
    j["lsb"] = report.lsb;
    j["lbr"] = report.lbr;
    j["lbr_frac_used"] = report.lbr_frac_used;
    json cands = json::array();
    for (const CandidateEvaluation& ev : report.candidates) cands.push_back(to_json(ev));
    j["candidates"] = std::move(cands);
    j["best"] = report.best;
    j["best_shed_mw"] = report.best_shed_mw ? json(*report.best_shed_mw) : json(nullptr);
    if (include_timings) {
        j["timings"] = json{{"level1_s", report.timings.level1_s},
                            {"sensitivity_s", report.timings.sensitivity_s},
                            {"ranking_s", report.timings.ranking_s},
                            {"evaluation_s", report.timings.evaluation_s},
                            {"total_s", report.timings.total_s}};
    }
    return j;
}

std::string evaluations_to_csv(const std::vector<CandidateEvaluation>& evals) {
    std::ostringstream out;
    out << "branch,lodf_score,shed_mw,violations,islanding,status\n";
    for (const CandidateEvaluation& ev : evals) {
        out << ev.branch_id << ',';
        out << (ev.lodf_score ? fmt_fixed(*ev.lodf_score, 6) : "") << ',';
        out << (ev.total_shed_mw ? fmt_fixed(*ev.total_shed_mw, 4) : "") << ',';
        out << ev.violation_count << ',' << (ev.islanding ? "true" : "false") << ',';
        switch (ev.status) {
            case EvalStatus::optimal: out << "optimal"; break;
            case EvalStatus::infeasible: out << "infeasible"; break;
            case EvalStatus::skipped: out << "skipped"; break;
        }
        out << '\n';
    }
    return out.str();
}

std::string evaluations_to_table(const std::vector<CandidateEvaluation>& evals) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof(line), "%7s %11s %10s %11s %9s  %s\n", "branch", "lodf_score",
                  "shed_mw", "violations", "island", "status");
    out << line;
    for (const CandidateEvaluation& ev : evals) {
        const std::string score = ev.lodf_score ? fmt_fixed(*ev.lodf_score, 4) : "-";
        const std::string shed = ev.total_shed_mw ? fmt_fixed(*ev.total_shed_mw, 4) : "-";
        const char* status = ev.status == EvalStatus::optimal
                                 ? "optimal"
                                 : (ev.status == EvalStatus::infeasible ? "infeasible" : "skipped");
        std::snprintf(line, sizeof(line), "%7d %11s %10s %11d %9s  %s\n", ev.branch_id,
                      score.c_str(), shed.c_str(), ev.violation_count,
                      ev.islanding ? "yes" : "no", status);
        out << line;
    }
    return out.str();
}

std::string ptdf_to_csv(const PtdfMatrix& ptdf, const Network& net) {
    std::ostringstream out;
    out << "branch";
    for (const Bus& b : net.buses()) out << ",bus_" << b.id;
    out << '\n';
    for (size_t r = 0; r < ptdf.branch_ids.size(); ++r) {
        out << ptdf.branch_ids[r];
        for (int c = 0; c < ptdf.values.cols(); ++c) {
            out << ',' << fmt_fixed(ptdf.values(static_cast<int>(r), c), 6);
        }
        out << '\n';
    }
    return out.str();
}

std::string lodf_to_csv(const LodfMatrix& lodf) {
    std::ostringstream out;
    out << "branch";
    for (int id : lodf.branch_ids) out << ",outage_" << id;
    out << '\n';
    for (size_t r = 0; r < lodf.branch_ids.size(); ++r) {
        out << lodf.branch_ids[r];
        for (size_t c = 0; c < lodf.branch_ids.size(); ++c) {
            if (lodf.bridge_mask[c]) {
                out << ",bridge";
            } else {
                out << ',' << fmt_fixed(lodf.values(static_cast<int>(r), static_cast<int>(c)), 6);
            }
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace gridswitch
