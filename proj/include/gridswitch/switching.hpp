#pragma once

#include <optional>
#include <vector>

#include "gridswitch/dispatch.hpp"
#include "gridswitch/network.hpp"
#include "gridswitch/sensitivity.hpp"

namespace gridswitch {

enum class LodfBasis { pre, post };

struct BilevelConfig {
    double shed_tol_mw = 1e-3;
    double lbr_loading_frac = 0.95;  // "close to their limits" threshold
    int top_k = 10;
    LodfBasis lodf_basis = LodfBasis::post;
    bool stop_at_zero_shed = false;
    double shed_weight = 10000.0;
    int lbr_radius = 1;  // bus hops from a shedding bus counted as "connected"
};

enum class EvalStatus { optimal, infeasible, skipped };

struct CandidateEvaluation {
    int branch_id = 0;
    std::optional<double> lodf_score;     // set when LODF-ranked
    std::optional<double> total_shed_mw;  // set for re-dispatch evaluations
    int violation_count = 0;
    bool islanding = false;
    EvalStatus status = EvalStatus::skipped;
};

struct PhaseTimings {
    double level1_s = 0.0;
    double sensitivity_s = 0.0;
    double ranking_s = 0.0;
    double evaluation_s = 0.0;
    double total_s = 0.0;
};

struct BilevelReport {
    ContingencySpec contingency;
    bool early_exit = false;
    double level1_shed_mw = 0.0;
    std::vector<int> lsb;
    std::vector<int> lbr;
    double lbr_frac_used = 0.0;
    std::vector<CandidateEvaluation> candidates;
    std::vector<int> best;  // candidate ids achieving the minimum shed
    std::optional<double> best_shed_mw;
    PhaseTimings timings;
};

/// Buses whose shed exceeds shed_tol_mw, ascending id.
std::vector<int> find_lsb(const DispatchSolution& sol, const Network& net, double shed_tol_mw);

/// In-service branches within `radius` bus hops of a shedding bus whose
/// loading |flow|/rating reaches loading_frac, sorted by loading descending.
std::vector<int> find_lbr(const Network& net, const std::vector<double>& flows_mw,
                          const std::vector<int>& lsb, double loading_frac, int radius = 1);

struct RankedCandidate {
    int branch_id = 0;
    double score = 0.0;
};

/// Switching candidates ordered by counter-flow effect on the limit branches:
/// score(c) = min over l in lbr of sign(f_l) * LODF(l, c) * sign(f_c), most
/// negative first. Bridges, limit branches, out-of-service branches and
/// exclude_branch are never returned.
std::vector<RankedCandidate> rank_by_lodf(const LodfMatrix& lodf,
                                          const std::vector<double>& flows_mw,
                                          const std::vector<int>& lbr, const Network& net,
                                          int top_k, int exclude_branch = 0);

/// Re-dispatch evaluation of each candidate on the post-contingency network.
/// Islanding candidates are recorded and skipped; per-candidate failures never
/// throw. Honors cfg.stop_at_zero_shed.
std::vector<CandidateEvaluation> evaluate_candidates(const Network& net_post,
                                                     const std::vector<RankedCandidate>& ranked,
                                                     const BilevelConfig& cfg);

BilevelReport run_bilevel(const Network& net, const ContingencySpec& contingency,
                          const BilevelConfig& cfg);

/// The n in-service branches graph-closest to the contingency branch
/// (bus-hop distance between nearest endpoints, ties by ordinal).
std::vector<int> baseline_cbce(const Network& net_post, int contingency_branch, int n);

/// As CBCE with distance measured to the nearest violated branch.
std::vector<int> baseline_cbve(const Network& net_post, const std::vector<Violation>& violations,
                               int n);

/// Fixed-injection evaluation: switch each candidate out, re-run the DC flow
/// with the given injections, count violations. No LP solve.
std::vector<CandidateEvaluation> baseline_evaluate_fixed(
    const Network& net_post, const std::vector<int>& candidates,
    const std::vector<double>& injections_mw);

enum class EnumerationMode { fixed, redispatch };

/// Every in-service non-bridge branch evaluated as a switching candidate.
/// fixed mode requires injections_mw.
std::vector<CandidateEvaluation> complete_enumeration(
    const Network& net_post, EnumerationMode mode, const BilevelConfig& cfg,
    const std::vector<double>* injections_mw = nullptr);

/// Deterministic evaluation order: attempted solves by shed then score then
/// ordinal; infeasible after optimal; islanding rows last.
bool evaluation_before(const CandidateEvaluation& a, const CandidateEvaluation& b);

}  // namespace gridswitch
