#include "gridswitch/network.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "gridswitch/errors.hpp"

namespace gridswitch {

std::string ContingencySpec::label() const {
    return (kind == Kind::branch ? "branch:" : "gen:") + std::to_string(element_id);
}

ContingencySpec ContingencySpec::parse(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw ValidationError("bad contingency '" + text + "', expected branch:N or gen:N");
    }
    const std::string kind = text.substr(0, colon);
    const std::string num = text.substr(colon + 1);
    ContingencySpec spec;
    if (kind == "branch") {
        spec.kind = Kind::branch;
    } else if (kind == "gen" || kind == "generator") {
        spec.kind = Kind::generator;
    } else {
        throw ValidationError("bad contingency kind '" + kind + "'");
    }
    try {
        size_t used = 0;
        spec.element_id = std::stoi(num, &used);
        if (used != num.size()) throw std::invalid_argument(num);
    } catch (const std::exception&) {
        throw ValidationError("bad contingency element '" + num + "'");
    }
    return spec;
}

Network::Network(double base_mva, int slack_bus, std::vector<Bus> buses,
                 std::vector<Branch> branches, std::vector<Generator> generators)
    : base_mva_(base_mva),
      slack_bus_(slack_bus),
      buses_(std::move(buses)),
      branches_(std::move(branches)),
      generators_(std::move(generators)) {
    if (!(base_mva_ > 0.0) || !std::isfinite(base_mva_)) {
        throw ValidationError("nonpositive base_mva");
    }
    if (buses_.empty()) throw ValidationError("no buses");
    for (size_t i = 0; i < buses_.size(); ++i) {
        const Bus& b = buses_[i];
        if (!bus_index_.emplace(b.id, static_cast<int>(i)).second) {
            throw ValidationError("duplicate bus id " + std::to_string(b.id));
        }
        if (!std::isfinite(b.load_mw) || b.load_mw < 0.0) {
            throw ValidationError("negative or non-finite load, bus " + std::to_string(b.id));
        }
    }
    for (size_t i = 0; i < branches_.size(); ++i) {
        Branch& br = branches_[i];
        const std::string tag = "branch " + std::to_string(i + 1);
        if (br.id != static_cast<int>(i + 1)) {
            throw ValidationError("branch ordinal mismatch at " + tag);
        }
        if (!bus_index_.count(br.from_bus)) {
            throw ValidationError("unknown bus " + std::to_string(br.from_bus) + ", " + tag);
        }
        if (!bus_index_.count(br.to_bus)) {
            throw ValidationError("unknown bus " + std::to_string(br.to_bus) + ", " + tag);
        }
        if (br.from_bus == br.to_bus) {
            throw ValidationError("self-loop, " + tag);
        }
        if (!(br.reactance_pu > 0.0) || !std::isfinite(br.reactance_pu)) {
            throw ValidationError("nonpositive reactance, " + tag);
        }
        if (!(br.rating_mw > 0.0) || !std::isfinite(br.rating_mw)) {
            throw ValidationError("nonpositive rating, " + tag);
        }
    }
    std::unordered_map<int, bool> gen_seen;
    for (const Generator& g : generators_) {
        if (!gen_seen.emplace(g.id, true).second) {
            throw ValidationError("duplicate generator id " + std::to_string(g.id));
        }
        const std::string tag = "generator " + std::to_string(g.id);
        if (!bus_index_.count(g.bus)) {
            throw ValidationError("unknown bus " + std::to_string(g.bus) + ", " + tag);
        }
        if (!std::isfinite(g.pmin_mw) || !std::isfinite(g.pmax_mw) || g.pmin_mw > g.pmax_mw) {
            throw ValidationError("pmin above pmax, " + tag);
        }
        if (!std::isfinite(g.cost_per_mwh) || g.cost_per_mwh < 0.0) {
            throw ValidationError("negative cost, " + tag);
        }
    }
    if (!bus_index_.count(slack_bus_)) {
        throw ValidationError("unknown slack bus " + std::to_string(slack_bus_));
    }
}

int Network::bus_index(int bus_id) const {
    auto it = bus_index_.find(bus_id);
    if (it == bus_index_.end()) {
        throw ValidationError("unknown bus " + std::to_string(bus_id));
    }
    return it->second;
}

const Branch& Network::branch(int branch_id) const {
    if (branch_id < 1 || branch_id > static_cast<int>(branches_.size())) {
        throw ValidationError("unknown branch " + std::to_string(branch_id));
    }
    return branches_[branch_id - 1];
}

const Generator* Network::find_generator(int gen_id) const {
    for (const Generator& g : generators_) {
        if (g.id == gen_id) return &g;
    }
    return nullptr;
}

std::vector<int> Network::in_service_branch_ids() const {
    std::vector<int> ids;
    ids.reserve(branches_.size());
    for (const Branch& br : branches_) {
        if (br.in_service) ids.push_back(br.id);
    }
    return ids;
}

int Network::in_service_branch_count() const {
    return static_cast<int>(in_service_branch_ids().size());
}

double Network::total_load_mw() const {
    double sum = 0.0;
    for (const Bus& b : buses_) sum += b.load_mw;
    return sum;
}

double Network::total_pmax_mw() const {
    double sum = 0.0;
    for (const Generator& g : generators_) sum += g.pmax_mw;
    return sum;
}

bool Network::connected() const {
    const int n = bus_count();
    std::vector<std::vector<int>> adj(n);
    for (const Branch& br : branches_) {
        if (!br.in_service) continue;
        const int f = bus_index_.at(br.from_bus);
        const int t = bus_index_.at(br.to_bus);
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
    return reached == n;
}

bool Network::operator==(const Network& other) const {
    return base_mva_ == other.base_mva_ && slack_bus_ == other.slack_bus_ &&
           buses_ == other.buses_ && branches_ == other.branches_ &&
           generators_ == other.generators_;
}

Network apply_load_profile(const Network& net, const std::map<int, double>& overrides_mw) {
    std::vector<Bus> buses = net.buses();
    for (const auto& [bus_id, load] : overrides_mw) {
        if (!net.has_bus(bus_id)) {
            throw ValidationError("unknown bus " + std::to_string(bus_id));
        }
        if (!std::isfinite(load) || load < 0.0) {
            throw ValidationError("negative or non-finite load, bus " + std::to_string(bus_id));
        }
        buses[net.bus_index(bus_id)].load_mw = load;
    }
    Network out(net.base_mva(), net.slack_bus(), std::move(buses), net.branches(),
                net.generators());
    if (out.total_pmax_mw() < out.total_load_mw()) {
        throw ValidationError("total generation capacity below total load");
    }
    return out;
}

Network apply_branch_outage(const Network& net, int branch_id) {
    const Branch& br = net.branch(branch_id);
    if (!br.in_service) {
        throw ValidationError("branch " + std::to_string(branch_id) + " already out of service");
    }
    std::vector<Branch> branches = net.branches();
    branches[branch_id - 1].in_service = false;
    return Network(net.base_mva(), net.slack_bus(), net.buses(), std::move(branches),
                   net.generators());
}

Network restore_branch(const Network& net, int branch_id) {
    const Branch& br = net.branch(branch_id);
    if (br.in_service) {
        throw ValidationError("branch " + std::to_string(branch_id) + " already in service");
    }
    std::vector<Branch> branches = net.branches();
    branches[branch_id - 1].in_service = true;
    return Network(net.base_mva(), net.slack_bus(), net.buses(), std::move(branches),
                   net.generators());
}

Network apply_generator_outage(const Network& net, int gen_id) {
    if (net.find_generator(gen_id) == nullptr) {
        throw ValidationError("unknown generator " + std::to_string(gen_id));
    }
    std::vector<Generator> gens;
    gens.reserve(net.generators().size());
    for (const Generator& g : net.generators()) {
        if (g.id != gen_id) gens.push_back(g);
    }
    return Network(net.base_mva(), net.slack_bus(), net.buses(), net.branches(), std::move(gens));
}

Network apply_contingency(const Network& net, const ContingencySpec& spec) {
    if (spec.kind == ContingencySpec::Kind::branch) {
        return apply_branch_outage(net, spec.element_id);
    }
    return apply_generator_outage(net, spec.element_id);
}

}  // namespace gridswitch
