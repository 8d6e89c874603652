#include "gridswitch/switching.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>

#include "gridswitch/errors.hpp"

namespace gridswitch {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void validate_config(const BilevelConfig& cfg) {
    if (!(cfg.lbr_loading_frac > 0.0) || cfg.lbr_loading_frac > 1.0) {
        throw ValidationError("lbr_loading_frac must be in (0, 1]");
    }
    if (cfg.top_k < 1) throw ValidationError("top_k must be at least 1");
    if (cfg.lbr_radius < 1) throw ValidationError("lbr_radius must be at least 1");
    if (!(cfg.shed_tol_mw >= 0.0)) throw ValidationError("shed_tol_mw must be non-negative");
}

// Bus-hop distances from a set of source buses over the in-service graph.
std::vector<int> bus_distances(const Network& net, const std::vector<int>& source_buses) {
    const int n = net.bus_count();
    std::vector<int> dist(n, -1);
    std::queue<int> q;
    for (int bus_id : source_buses) {
        const int i = net.bus_index(bus_id);
        if (dist[i] != 0) {
            dist[i] = 0;
            q.push(i);
        }
    }
    std::vector<std::vector<int>> adj(n);
    for (const Branch& br : net.branches()) {
        if (!br.in_service) continue;
        const int f = net.bus_index(br.from_bus);
        const int t = net.bus_index(br.to_bus);
        adj[f].push_back(t);
        adj[t].push_back(f);
    }
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int v : adj[u]) {
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                q.push(v);
            }
        }
    }
    return dist;
}

std::vector<int> closest_branches(const Network& net, const std::vector<int>& source_buses,
                                  int n) {
    const std::vector<int> dist = bus_distances(net, source_buses);
    std::vector<std::pair<int, int>> scored;  // (distance, branch id)
    for (const Branch& br : net.branches()) {
        if (!br.in_service) continue;
        const int df = dist[net.bus_index(br.from_bus)];
        const int dt = dist[net.bus_index(br.to_bus)];
        int d = -1;
        if (df >= 0 && dt >= 0) d = std::min(df, dt);
        else if (df >= 0) d = df;
        else if (dt >= 0) d = dt;
        if (d >= 0) scored.emplace_back(d, br.id);
    }
    std::sort(scored.begin(), scored.end());
    if (static_cast<int>(scored.size()) > n) scored.resize(n);
    std::vector<int> ids;
    ids.reserve(scored.size());
    for (const auto& [d, id] : scored) ids.push_back(id);
    return ids;
}

CandidateEvaluation evaluate_one_redispatch(const Network& net_post, int branch_id,
                                            std::optional<double> score,
                                            const BilevelConfig& cfg) {
    CandidateEvaluation ev;
    ev.branch_id = branch_id;
    ev.lodf_score = score;
    if (is_bridge(net_post, branch_id)) {
        ev.islanding = true;
        ev.status = EvalStatus::skipped;
        return ev;
    }
    DispatchProblem dp(apply_branch_outage(net_post, branch_id));
    dp.allow_redispatch = true;
    dp.shed_weight = cfg.shed_weight;
    dp.enforce_limits = true;
    const DispatchSolution sol = solve_dispatch(dp);
    if (sol.status != DispatchStatus::optimal) {
        ev.status = EvalStatus::infeasible;
        return ev;
    }
    ev.status = EvalStatus::optimal;
    ev.total_shed_mw = sol.total_shed_mw;
    ev.violation_count = static_cast<int>(violation_check(sol.flows_mw, dp.net).size());
    return ev;
}

}  // namespace

bool evaluation_before(const CandidateEvaluation& a, const CandidateEvaluation& b) {
    const double inf = std::numeric_limits<double>::infinity();
    const auto rank = [](const CandidateEvaluation& e) {
        if (e.islanding) return 2;
        return e.status == EvalStatus::infeasible ? 1 : 0;
    };
    const double shed_a = a.total_shed_mw.value_or(inf);
    const double shed_b = b.total_shed_mw.value_or(inf);
    if (shed_a != shed_b) return shed_a < shed_b;
    if (rank(a) != rank(b)) return rank(a) < rank(b);
    if (a.violation_count != b.violation_count) return a.violation_count < b.violation_count;
    const double score_a = a.lodf_score.value_or(0.0);
    const double score_b = b.lodf_score.value_or(0.0);
    if (score_a != score_b) return score_a < score_b;
    return a.branch_id < b.branch_id;
}

std::vector<int> find_lsb(const DispatchSolution& sol, const Network& net, double shed_tol_mw) {
    if (sol.status != DispatchStatus::optimal) {
        throw ValidationError("find_lsb requires an optimal dispatch solution");
    }
    std::vector<int> lsb;
    for (int i = 0; i < net.bus_count(); ++i) {
        if (sol.shed_mw[i] > shed_tol_mw) lsb.push_back(net.buses()[i].id);
    }
    std::sort(lsb.begin(), lsb.end());
    return lsb;
}

std::vector<int> find_lbr(const Network& net, const std::vector<double>& flows_mw,
                          const std::vector<int>& lsb, double loading_frac, int radius) {
    if (lsb.empty()) throw ValidationError("find_lbr requires a non-empty LSB set");
    if (static_cast<int>(flows_mw.size()) != net.branch_count()) {
        throw ValidationError("flow vector size does not match branch count");
    }
    const std::vector<int> dist = bus_distances(net, lsb);
    std::vector<std::pair<double, int>> scored;  // (loading, id)
    for (const Branch& br : net.branches()) {
        if (!br.in_service) continue;
        const int df = dist[net.bus_index(br.from_bus)];
        const int dt = dist[net.bus_index(br.to_bus)];
        const bool near = (df >= 0 && df < radius) || (dt >= 0 && dt < radius);
        if (!near) continue;
        const double loading = std::abs(flows_mw[br.id - 1]) / br.rating_mw;
        if (loading >= loading_frac) scored.emplace_back(loading, br.id);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<int> out;
    out.reserve(scored.size());
    for (const auto& [loading, id] : scored) out.push_back(id);
    return out;
}

std::vector<RankedCandidate> rank_by_lodf(const LodfMatrix& lodf,
                                          const std::vector<double>& flows_mw,
                                          const std::vector<int>& lbr, const Network& net,
                                          int top_k, int exclude_branch) {
    if (lbr.empty()) throw ValidationError("rank_by_lodf requires a non-empty LBr set");
    if (top_k < 1) throw ValidationError("top_k must be at least 1");

    std::vector<RankedCandidate> scored;
    for (const Branch& br : net.branches()) {
        if (!br.in_service || br.id == exclude_branch) continue;
        if (std::find(lbr.begin(), lbr.end(), br.id) != lbr.end()) continue;
        const int col = lodf.row_of(br.id);
        if (col < 0 || lodf.bridge_mask[col]) continue;
        if (is_bridge(net, br.id)) continue;  // pre-basis LODF can miss post-topology bridges
        double score = std::numeric_limits<double>::infinity();
        const double fc = sign_of(flows_mw[br.id - 1]);
        for (int l : lbr) {
            const int row = lodf.row_of(l);
            if (row < 0) throw ValidationError("limit branch " + std::to_string(l) +
                                               " missing from LODF matrix");
            const double s = sign_of(flows_mw[l - 1]) * lodf.values(row, col) * fc;
            score = std::min(score, s);
        }
        scored.push_back({br.id, score});
    }
    std::sort(scored.begin(), scored.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
        if (a.score != b.score) return a.score < b.score;
        return a.branch_id < b.branch_id;
    });
    if (static_cast<int>(scored.size()) > top_k) scored.resize(top_k);
    return scored;
}

std::vector<CandidateEvaluation> evaluate_candidates(const Network& net_post,
                                                     const std::vector<RankedCandidate>& ranked,
                                                     const BilevelConfig& cfg) {
    std::vector<CandidateEvaluation> evals;
    evals.reserve(ranked.size());
    for (const RankedCandidate& rc : ranked) {
        CandidateEvaluation ev = evaluate_one_redispatch(net_post, rc.branch_id, rc.score, cfg);
        evals.push_back(ev);
        if (cfg.stop_at_zero_shed && ev.status == EvalStatus::optimal &&
            *ev.total_shed_mw <= cfg.shed_tol_mw && ev.violation_count == 0) {
            break;
        }
    }
    std::sort(evals.begin(), evals.end(), evaluation_before);
    return evals;
}

BilevelReport run_bilevel(const Network& net, const ContingencySpec& contingency,
                          const BilevelConfig& cfg) {
    validate_config(cfg);
    const auto t_total = Clock::now();

    BilevelReport report;
    report.contingency = contingency;

    const Network net_post = apply_contingency(net, contingency);

    const auto t_level1 = Clock::now();
    DispatchProblem level1(net_post);
    level1.allow_redispatch = true;
    level1.shed_weight = cfg.shed_weight;
    level1.enforce_limits = true;
    const DispatchSolution sol = solve_dispatch(level1);
    report.timings.level1_s = seconds_since(t_level1);
    if (sol.status != DispatchStatus::optimal) {
        throw AnalysisError("post-contingency dispatch infeasible for " + contingency.label());
    }
    report.level1_shed_mw = sol.total_shed_mw;

    if (sol.total_shed_mw <= cfg.shed_tol_mw) {
        report.early_exit = true;  // no load shedding, no second level
        report.timings.total_s = seconds_since(t_total);
        return report;
    }

    report.lsb = find_lsb(sol, net_post, cfg.shed_tol_mw);

    // Relax the loading threshold in 0.05 steps down to 0.50 if no incident
    // branch qualifies.
    double frac = cfg.lbr_loading_frac;
    while (true) {
        report.lbr = find_lbr(net_post, sol.flows_mw, report.lsb, frac, cfg.lbr_radius);
        if (!report.lbr.empty() || frac <= 0.50 + 1e-9) break;
        frac = std::max(0.50, frac - 0.05);
    }
    report.lbr_frac_used = frac;
    if (report.lbr.empty()) {
        report.timings.total_s = seconds_since(t_total);
        return report;  // no limit branches even at the widest threshold
    }

    const auto t_sens = Clock::now();
    const Network& lodf_net =
        (cfg.lodf_basis == LodfBasis::post) ? net_post : net;
    const PtdfMatrix ptdf = compute_ptdf(lodf_net);
    const LodfMatrix lodf = compute_lodf(ptdf, lodf_net);
    report.timings.sensitivity_s = seconds_since(t_sens);

    const auto t_rank = Clock::now();
    const int exclude =
        contingency.kind == ContingencySpec::Kind::branch ? contingency.element_id : 0;
    const std::vector<RankedCandidate> ranked =
        rank_by_lodf(lodf, sol.flows_mw, report.lbr, net_post, cfg.top_k, exclude);
    report.timings.ranking_s = seconds_since(t_rank);

    const auto t_eval = Clock::now();
    report.candidates = evaluate_candidates(net_post, ranked, cfg);
    report.timings.evaluation_s = seconds_since(t_eval);

    double best = std::numeric_limits<double>::infinity();
    for (const CandidateEvaluation& ev : report.candidates) {
        if (ev.status == EvalStatus::optimal && *ev.total_shed_mw < best) {
            best = *ev.total_shed_mw;
        }
    }
    if (std::isfinite(best)) {
        report.best_shed_mw = best;
        for (const CandidateEvaluation& ev : report.candidates) {
            if (ev.status == EvalStatus::optimal && *ev.total_shed_mw <= best + 1e-9) {
                report.best.push_back(ev.branch_id);
            }
        }
        std::sort(report.best.begin(), report.best.end());
    }
    report.timings.total_s = seconds_since(t_total);
    return report;
}

std::vector<int> baseline_cbce(const Network& net_post, int contingency_branch, int n) {
    const Branch& br = net_post.branch(contingency_branch);
    return closest_branches(net_post, {br.from_bus, br.to_bus}, n);
}

std::vector<int> baseline_cbve(const Network& net_post, const std::vector<Violation>& violations,
                               int n) {
    if (violations.empty()) throw ValidationError("CBVE requires a non-empty violation set");
    std::vector<int> buses;
    for (const Violation& v : violations) {
        const Branch& br = net_post.branch(v.branch_id);
        buses.push_back(br.from_bus);
        buses.push_back(br.to_bus);
    }
    return closest_branches(net_post, buses, n);
}

std::vector<CandidateEvaluation> baseline_evaluate_fixed(
    const Network& net_post, const std::vector<int>& candidates,
    const std::vector<double>& injections_mw) {
    std::vector<CandidateEvaluation> evals;
    evals.reserve(candidates.size());
    for (int id : candidates) {
        CandidateEvaluation ev;
        ev.branch_id = id;
        if (is_bridge(net_post, id)) {
            ev.islanding = true;
            ev.status = EvalStatus::skipped;
            evals.push_back(ev);
            continue;
        }
        const Network net_out = apply_branch_outage(net_post, id);
        const std::vector<double> flows = dc_power_flow_slack_balanced(net_out, injections_mw);
        ev.status = EvalStatus::optimal;
        ev.violation_count = static_cast<int>(violation_check(flows, net_out).size());
        evals.push_back(ev);
    }
    return evals;
}

std::vector<CandidateEvaluation> complete_enumeration(const Network& net_post,
                                                      EnumerationMode mode,
                                                      const BilevelConfig& cfg,
                                                      const std::vector<double>* injections_mw) {
    if (mode == EnumerationMode::fixed && injections_mw == nullptr) {
        throw ValidationError("fixed-mode enumeration requires injections");
    }
    std::vector<int> candidates;
    for (const Branch& br : net_post.branches()) {
        if (br.in_service && !is_bridge(net_post, br.id)) candidates.push_back(br.id);
    }
    std::vector<CandidateEvaluation> evals;
    if (mode == EnumerationMode::fixed) {
        evals = baseline_evaluate_fixed(net_post, candidates, *injections_mw);
    } else {
        evals.reserve(candidates.size());
        for (int id : candidates) {
            evals.push_back(evaluate_one_redispatch(net_post, id, std::nullopt, cfg));
        }
    }
    std::sort(evals.begin(), evals.end(), evaluation_before);
    return evals;
}

}  // namespace gridswitch
