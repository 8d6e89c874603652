#include "gridswitch/sensitivity.hpp"

#include <cmath>
#include <queue>

#include "gridswitch/errors.hpp"

namespace gridswitch {
namespace {

constexpr double kBridgeDenomTol = 1e-6;

// Reduced nodal susceptance matrix (slack row/column removed) and the mapping
// from bus index to reduced index (-1 for the slack).
struct ReducedSystem {
    Eigen::MatrixXd b_reduced;
    std::vector<int> reduced_index;
    int slack_index = 0;
};

ReducedSystem build_reduced(const Network& net, int ref_bus) {
    const int n = net.bus_count();
    const int slack = net.bus_index(ref_bus);
    ReducedSystem sys;
    sys.slack_index = slack;
    sys.reduced_index.assign(n, -1);
    int next = 0;
    for (int i = 0; i < n; ++i) {
        if (i != slack) sys.reduced_index[i] = next++;
    }
    sys.b_reduced = Eigen::MatrixXd::Zero(n - 1, n - 1);
    for (const Branch& br : net.branches()) {
        if (!br.in_service) continue;
        const double b = 1.0 / br.reactance_pu;
        const int f = sys.reduced_index[net.bus_index(br.from_bus)];
        const int t = sys.reduced_index[net.bus_index(br.to_bus)];
        if (f >= 0) sys.b_reduced(f, f) += b;
        if (t >= 0) sys.b_reduced(t, t) += b;
        if (f >= 0 && t >= 0) {
            sys.b_reduced(f, t) -= b;
            sys.b_reduced(t, f) -= b;
        }
    }
    return sys;
}

std::vector<double> flows_from_angles(const Network& net, const Eigen::VectorXd& theta) {
    std::vector<double> flows(net.branch_count(), 0.0);
    for (const Branch& br : net.branches()) {
        if (!br.in_service) continue;
        const double df = theta[net.bus_index(br.from_bus)] - theta[net.bus_index(br.to_bus)];
        flows[br.id - 1] = df / br.reactance_pu * net.base_mva();
    }
    return flows;
}

std::vector<double> solve_flows(const Network& net, const std::vector<double>& injections_mw) {
    if (static_cast<int>(injections_mw.size()) != net.bus_count()) {
        throw ValidationError("injection vector size does not match bus count");
    }
    if (!net.connected()) throw AnalysisError("disconnected network");

    const ReducedSystem sys = build_reduced(net, net.slack_bus());
    Eigen::VectorXd p(net.bus_count() - 1);
    for (int i = 0; i < net.bus_count(); ++i) {
        const int r = sys.reduced_index[i];
        if (r >= 0) p[r] = injections_mw[i] / net.base_mva();
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(sys.b_reduced);
    if (ldlt.info() != Eigen::Success) {
        throw AnalysisError("singular susceptance matrix");
    }
    const Eigen::VectorXd theta_red = ldlt.solve(p);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(net.bus_count());
    for (int i = 0; i < net.bus_count(); ++i) {
        const int r = sys.reduced_index[i];
        if (r >= 0) theta[i] = theta_red[r];
    }
    return flows_from_angles(net, theta);
}

}  // namespace

int PtdfMatrix::row_of(int branch_id) const {
    for (size_t i = 0; i < branch_ids.size(); ++i) {
        if (branch_ids[i] == branch_id) return static_cast<int>(i);
    }
    return -1;
}

int LodfMatrix::row_of(int branch_id) const {
    for (size_t i = 0; i < branch_ids.size(); ++i) {
        if (branch_ids[i] == branch_id) return static_cast<int>(i);
    }
    return -1;
}

bool LodfMatrix::is_bridge(int branch_id) const {
    const int r = row_of(branch_id);
    if (r < 0) throw ValidationError("branch " + std::to_string(branch_id) + " not in service");
    return bridge_mask[r];
}

double LodfMatrix::value(int branch_l, int branch_k) const {
    const int r = row_of(branch_l);
    const int c = row_of(branch_k);
    if (r < 0) throw ValidationError("branch " + std::to_string(branch_l) + " not in service");
    if (c < 0) throw ValidationError("branch " + std::to_string(branch_k) + " not in service");
    return values(r, c);
}

std::vector<double> dc_power_flow(const Network& net, const std::vector<double>& injections_mw) {
    double sum = 0.0;
    for (double v : injections_mw) sum += v;
    if (std::abs(sum) > 1e-6) {
        throw AnalysisError("injections do not balance (net " + std::to_string(sum) + " MW)");
    }
    return solve_flows(net, injections_mw);
}

std::vector<double> dc_power_flow_slack_balanced(const Network& net,
                                                 const std::vector<double>& injections_mw) {
    return solve_flows(net, injections_mw);
}

PtdfMatrix compute_ptdf(const Network& net) { return compute_ptdf(net, net.slack_bus()); }

PtdfMatrix compute_ptdf(const Network& net, int ref_bus) {
    if (!net.has_bus(ref_bus)) throw ValidationError("unknown bus " + std::to_string(ref_bus));
    if (!net.connected()) throw AnalysisError("disconnected network");

    const int n = net.bus_count();
    const ReducedSystem sys = build_reduced(net, ref_bus);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(sys.b_reduced);
    if (ldlt.info() != Eigen::Success) {
        throw AnalysisError("singular susceptance matrix");
    }
    const Eigen::MatrixXd x_red = ldlt.solve(Eigen::MatrixXd::Identity(n - 1, n - 1));

    // Embed the reduced inverse with a zero row/column at the reference bus.
    Eigen::MatrixXd x_full = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const int ri = sys.reduced_index[i];
        if (ri < 0) continue;
        for (int j = 0; j < n; ++j) {
            const int rj = sys.reduced_index[j];
            if (rj >= 0) x_full(i, j) = x_red(ri, rj);
        }
    }

    PtdfMatrix ptdf;
    ptdf.ref_bus = ref_bus;
    ptdf.branch_ids = net.in_service_branch_ids();
    ptdf.values.resize(static_cast<int>(ptdf.branch_ids.size()), n);
    for (size_t r = 0; r < ptdf.branch_ids.size(); ++r) {
        const Branch& br = net.branch(ptdf.branch_ids[r]);
        const int f = net.bus_index(br.from_bus);
        const int t = net.bus_index(br.to_bus);
        ptdf.values.row(static_cast<int>(r)) =
            (x_full.row(f) - x_full.row(t)) / br.reactance_pu;
    }
    return ptdf;
}

LodfMatrix compute_lodf(const PtdfMatrix& ptdf, const Network& net) {
    const int nl = static_cast<int>(ptdf.branch_ids.size());
    LodfMatrix lodf;
    lodf.branch_ids = ptdf.branch_ids;
    lodf.bridge_mask.assign(nl, false);
    lodf.values = Eigen::MatrixXd::Zero(nl, nl);
    for (int k = 0; k < nl; ++k) {
        const Branch& br = net.branch(ptdf.branch_ids[k]);
        const int f = net.bus_index(br.from_bus);
        const int t = net.bus_index(br.to_bus);
        const Eigen::VectorXd transfer = ptdf.values.col(f) - ptdf.values.col(t);
        const double denom = 1.0 - transfer[k];
        if (std::abs(denom) < kBridgeDenomTol) {
            lodf.bridge_mask[k] = true;
            continue;
        }
        lodf.values.col(k) = transfer / denom;
        lodf.values(k, k) = -1.0;
    }
    return lodf;
}

std::vector<double> predict_outage_flows(const std::vector<double>& flows_mw,
                                         const LodfMatrix& lodf, int outage_branch_id) {
    const int k = lodf.row_of(outage_branch_id);
    if (k < 0) {
        throw ValidationError("branch " + std::to_string(outage_branch_id) + " not in service");
    }
    if (lodf.bridge_mask[k]) {
        throw AnalysisError("branch " + std::to_string(outage_branch_id) +
                            " is a bridge; outage islands the network");
    }
    std::vector<double> out = flows_mw;
    const double fk = flows_mw[outage_branch_id - 1];
    for (size_t r = 0; r < lodf.branch_ids.size(); ++r) {
        const int id = lodf.branch_ids[r];
        out[id - 1] += lodf.values(static_cast<int>(r), k) * fk;
    }
    out[outage_branch_id - 1] = 0.0;
    return out;
}

bool is_bridge(const Network& net, int branch_id) {
    const Branch& target = net.branch(branch_id);
    if (!target.in_service) {
        throw ValidationError("branch " + std::to_string(branch_id) + " not in service");
    }
    const int n = net.bus_count();
    std::vector<std::vector<int>> adj(n);
    for (const Branch& br : net.branches()) {
        if (!br.in_service || br.id == branch_id) continue;
        const int f = net.bus_index(br.from_bus);
        const int t = net.bus_index(br.to_bus);
        adj[f].push_back(t);
        adj[t].push_back(f);
    }
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int v : adj[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                ++reached;
                q.push(v);
            }
        }
    }
    return reached != n;
}

std::vector<double> injections_from_dispatch(const Network& net,
                                             const std::vector<double>& gen_mw,
                                             const std::vector<double>* shed_mw) {
    if (gen_mw.size() != net.generators().size()) {
        throw ValidationError("generation vector size does not match generator count");
    }
    if (shed_mw && static_cast<int>(shed_mw->size()) != net.bus_count()) {
        throw ValidationError("shed vector size does not match bus count");
    }
    std::vector<double> inj(net.bus_count(), 0.0);
    for (size_t g = 0; g < gen_mw.size(); ++g) {
        inj[net.bus_index(net.generators()[g].bus)] += gen_mw[g];
    }
    for (int i = 0; i < net.bus_count(); ++i) {
        double load = net.buses()[i].load_mw;
        if (shed_mw) load -= (*shed_mw)[i];
        inj[i] -= load;
    }
    return inj;
}

}  // namespace gridswitch
