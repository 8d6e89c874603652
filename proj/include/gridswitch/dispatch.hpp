#pragma once

#include <map>
#include <optional>
#include <vector>

#include "gridswitch/network.hpp"

namespace gridswitch {

/// DC optimal dispatch with per-bus dispatchable load (shed). When
/// allow_redispatch is false, every generator listed in fixed_gen_mw is capped
/// at its fixed output (bounds [pmin, fixed]); unlisted generators stay fully
/// dispatchable. shed_weight must exceed every generator cost so shedding is
/// lexicographically minimized.
struct DispatchProblem {
    explicit DispatchProblem(Network network) : net(std::move(network)) {}

    Network net;
    bool allow_redispatch = true;
    std::optional<std::map<int, double>> fixed_gen_mw;
    double shed_weight = 10000.0;
    bool enforce_limits = true;
};

enum class DispatchStatus { optimal, infeasible };

struct DispatchSolution {
    DispatchStatus status = DispatchStatus::infeasible;
    std::vector<double> gen_mw;    // per generator, case order
    std::vector<double> shed_mw;   // per bus, case order
    std::vector<double> flows_mw;  // per branch ordinal; zero for out-of-service
    double objective = 0.0;
    double total_shed_mw = 0.0;
};

DispatchSolution solve_dispatch(const DispatchProblem& problem);

struct Violation {
    int branch_id = 0;
    double flow_mw = 0.0;
    double rating_mw = 0.0;
    double overload_pct = 0.0;
};

/// Branches with |flow| > rating * (1 + tolerance_frac), sorted by overload
/// percentage descending (ties by ordinal).
std::vector<Violation> violation_check(const std::vector<double>& flows_mw, const Network& net,
                                       double tolerance_frac = 1e-7);

/// Per-generator outputs of a solution keyed by generator id, excluding
/// generators at the given bus (pass the slack bus to build the re-dispatch
/// fixation used by the no-redispatch scenario).
std::map<int, double> fixed_outputs(const Network& net, const DispatchSolution& sol,
                                    int exclude_bus);

}  // namespace gridswitch
