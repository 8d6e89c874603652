#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gridswitch/network.hpp"

namespace gridswitch {

/// Branch-flow sensitivities to single-bus injections withdrawn at ref_bus.
/// Rows cover in-service branches in case order; columns cover all buses in
/// case order. The ref_bus column is identically zero and every entry lies in
/// [-1, 1] for a reactance-only network.
struct PtdfMatrix {
    Eigen::MatrixXd values;
    std::vector<int> branch_ids;   // row -> branch ordinal
    int ref_bus = 0;

    int row_of(int branch_id) const;  // -1 when branch is out of service
};

/// Entry (l, k): fraction of branch k's pre-outage flow picked up by branch l
/// when k is outaged. Diagonal is exactly -1. Columns of bridge branches are
/// flagged in bridge_mask and left zero rather than populated.
struct LodfMatrix {
    Eigen::MatrixXd values;
    std::vector<int> branch_ids;
    std::vector<bool> bridge_mask;

    int row_of(int branch_id) const;
    bool is_bridge(int branch_id) const;
    double value(int branch_l, int branch_k) const;
};

/// DC power flow for balanced injections (MW, bus case order). The slack bus
/// angle is fixed at zero. Throws AnalysisError on a disconnected network or
/// injections that do not balance within 1e-6 MW.
std::vector<double> dc_power_flow(const Network& net, const std::vector<double>& injections_mw);

/// As dc_power_flow, but any injection imbalance is absorbed at the slack bus.
/// Used for fixed-injection studies after a generator outage.
std::vector<double> dc_power_flow_slack_balanced(const Network& net,
                                                 const std::vector<double>& injections_mw);

PtdfMatrix compute_ptdf(const Network& net);
PtdfMatrix compute_ptdf(const Network& net, int ref_bus);
LodfMatrix compute_lodf(const PtdfMatrix& ptdf, const Network& net);

/// Post-outage flows for outaged branch k: f'_l = f_l + LODF(l,k) * f_k, f'_k = 0.
std::vector<double> predict_outage_flows(const std::vector<double>& flows_mw,
                                         const LodfMatrix& lodf, int outage_branch_id);

/// True iff removing the branch disconnects the in-service graph.
bool is_bridge(const Network& net, int branch_id);

/// Per-bus injections (MW, bus case order) implied by a generation vector and
/// optional per-bus shed: generation minus served load.
std::vector<double> injections_from_dispatch(const Network& net,
                                             const std::vector<double>& gen_mw,
                                             const std::vector<double>* shed_mw = nullptr);

}  // namespace gridswitch
