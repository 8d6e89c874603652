#include "gridswitch/dispatch.hpp"

#include <algorithm>
#include <cmath>

#include "gridswitch/errors.hpp"
#include "gridswitch/lp.hpp"

namespace gridswitch {

DispatchSolution solve_dispatch(const DispatchProblem& problem) {
    const Network& net = problem.net;
    if (!net.connected()) throw AnalysisError("disconnected network");

    for (const Generator& g : net.generators()) {
        if (!(problem.shed_weight > g.cost_per_mwh)) {
            throw ValidationError("shed_weight must exceed every generator cost");
        }
    }
    if (!problem.allow_redispatch) {
        if (!problem.fixed_gen_mw.has_value()) {
            throw ValidationError("fixed_gen_mw required when redispatch is off");
        }
        for (const auto& [gen_id, mw] : *problem.fixed_gen_mw) {
            const Generator* g = net.find_generator(gen_id);
            if (g == nullptr) throw ValidationError("unknown generator " + std::to_string(gen_id));
            if (mw < g->pmin_mw - 1e-6 || mw > g->pmax_mw + 1e-6) {
                throw ValidationError("fixed output outside limits, generator " +
                                      std::to_string(gen_id));
            }
        }
    }

    const int nb = net.bus_count();
    const int ng = static_cast<int>(net.generators().size());
    const std::vector<int> live = net.in_service_branch_ids();
    const int nf = static_cast<int>(live.size());

    std::vector<int> shed_bus;  // bus indices carrying load
    for (int i = 0; i < nb; ++i) {
        if (net.buses()[i].load_mw > 0.0) shed_bus.push_back(i);
    }
    const int ns = static_cast<int>(shed_bus.size());

    // Variable layout: [generators][sheds][angles (phi = theta*base)][flows].
    const int off_shed = ng;
    const int off_phi = ng + ns;
    const int off_flow = ng + ns + nb;
    const int nvar = off_flow + nf;
    const int nrow = nf + nb;

    // Caps chosen to never bind: no branch flow can exceed the total power in
    // play, and phi differences telescope over branch reactances.
    const double power_scale = net.total_load_mw() + net.total_pmax_mw() + 1.0;
    double x_sum = 1.0;
    for (const Branch& br : net.branches()) x_sum += br.reactance_pu;
    const double phi_bound = power_scale * x_sum;

    LpProblem lp;
    lp.objective = Eigen::VectorXd::Zero(nvar);
    lp.lower = Eigen::VectorXd::Zero(nvar);
    lp.upper = Eigen::VectorXd::Zero(nvar);
    lp.eq_matrix = Eigen::MatrixXd::Zero(nrow, nvar);
    lp.eq_rhs = Eigen::VectorXd::Zero(nrow);

    for (int g = 0; g < ng; ++g) {
        const Generator& gen = net.generators()[g];
        lp.objective[g] = gen.cost_per_mwh;
        lp.lower[g] = gen.pmin_mw;
        lp.upper[g] = gen.pmax_mw;
        if (!problem.allow_redispatch) {
            auto it = problem.fixed_gen_mw->find(gen.id);
            if (it != problem.fixed_gen_mw->end()) {
                lp.upper[g] = std::clamp(it->second, gen.pmin_mw, gen.pmax_mw);
            }
        }
    }
    for (int s = 0; s < ns; ++s) {
        lp.objective[off_shed + s] = problem.shed_weight;
        lp.upper[off_shed + s] = net.buses()[shed_bus[s]].load_mw;
    }
    const int slack_index = net.bus_index(net.slack_bus());
    for (int i = 0; i < nb; ++i) {
        if (i == slack_index) continue;  // slack angle pinned at zero
        lp.lower[off_phi + i] = -phi_bound;
        lp.upper[off_phi + i] = phi_bound;
    }
    for (int l = 0; l < nf; ++l) {
        const double cap =
            problem.enforce_limits ? net.branch(live[l]).rating_mw : power_scale;
        lp.lower[off_flow + l] = -cap;
        lp.upper[off_flow + l] = cap;
    }

    // Flow definition rows: f_l - (phi_f - phi_t)/x_l = 0.
    for (int l = 0; l < nf; ++l) {
        const Branch& br = net.branch(live[l]);
        const double inv_x = 1.0 / br.reactance_pu;
        lp.eq_matrix(l, off_flow + l) = 1.0;
        lp.eq_matrix(l, off_phi + net.bus_index(br.from_bus)) -= inv_x;
        lp.eq_matrix(l, off_phi + net.bus_index(br.to_bus)) += inv_x;
    }
    // Bus balance rows: gen + shed + inflow - outflow = load.
    for (int i = 0; i < nb; ++i) {
        const int row = nf + i;
        lp.eq_rhs[row] = net.buses()[i].load_mw;
        for (int g = 0; g < ng; ++g) {
            if (net.bus_index(net.generators()[g].bus) == i) lp.eq_matrix(row, g) = 1.0;
        }
        for (int s = 0; s < ns; ++s) {
            if (shed_bus[s] == i) lp.eq_matrix(row, off_shed + s) = 1.0;
        }
        for (int l = 0; l < nf; ++l) {
            const Branch& br = net.branch(live[l]);
            if (net.bus_index(br.from_bus) == i) lp.eq_matrix(row, off_flow + l) -= 1.0;
            if (net.bus_index(br.to_bus) == i) lp.eq_matrix(row, off_flow + l) += 1.0;
        }
    }

    const LpSolution lpsol = solve_lp(lp);
    DispatchSolution sol;
    if (lpsol.status != LpStatus::optimal) {
        sol.status = DispatchStatus::infeasible;
        return sol;
    }
    sol.status = DispatchStatus::optimal;
    sol.objective = lpsol.objective;
    sol.gen_mw.assign(ng, 0.0);
    for (int g = 0; g < ng; ++g) sol.gen_mw[g] = lpsol.x[g];
    sol.shed_mw.assign(nb, 0.0);
    for (int s = 0; s < ns; ++s) {
        sol.shed_mw[shed_bus[s]] = lpsol.x[off_shed + s];
        sol.total_shed_mw += lpsol.x[off_shed + s];
    }
    sol.flows_mw.assign(net.branch_count(), 0.0);
    for (int l = 0; l < nf; ++l) sol.flows_mw[live[l] - 1] = lpsol.x[off_flow + l];
    return sol;
}

std::vector<Violation> violation_check(const std::vector<double>& flows_mw, const Network& net,
                                       double tolerance_frac) {
    if (static_cast<int>(flows_mw.size()) != net.branch_count()) {
        throw ValidationError("flow vector size does not match branch count");
    }
    std::vector<Violation> out;
    for (const Branch& br : net.branches()) {
        if (!br.in_service) continue;
        const double flow = flows_mw[br.id - 1];
        if (std::abs(flow) > br.rating_mw * (1.0 + tolerance_frac)) {
            Violation v;
            v.branch_id = br.id;
            v.flow_mw = flow;
            v.rating_mw = br.rating_mw;
            v.overload_pct = (std::abs(flow) / br.rating_mw - 1.0) * 100.0;
            out.push_back(v);
        }
    }
    std::sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
        if (a.overload_pct != b.overload_pct) return a.overload_pct > b.overload_pct;
        return a.branch_id < b.branch_id;
    });
    return out;
}

std::map<int, double> fixed_outputs(const Network& net, const DispatchSolution& sol,
                                    int exclude_bus) {
    if (sol.gen_mw.size() != net.generators().size()) {
        throw ValidationError("solution does not match network generators");
    }
    std::map<int, double> fixed;
    for (size_t g = 0; g < net.generators().size(); ++g) {
        const Generator& gen = net.generators()[g];
        if (gen.bus == exclude_bus) continue;
        fixed[gen.id] = sol.gen_mw[g];
    }
    return fixed;
}

}  // namespace gridswitch
