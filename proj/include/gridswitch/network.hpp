#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace gridswitch {

struct Bus {
    int id = 0;
    double load_mw = 0.0;

    bool operator==(const Bus&) const = default;
};

/// Branch ordinals are 1-based positions in case-file order and stay stable
/// across outages: an outaged branch is kept with in_service = false.
struct Branch {
    int id = 0;
    int from_bus = 0;
    int to_bus = 0;
    double reactance_pu = 0.0;
    double rating_mw = 0.0;
    bool in_service = true;

    bool operator==(const Branch&) const = default;
};

struct Generator {
    int id = 0;
    int bus = 0;
    double pmin_mw = 0.0;
    double pmax_mw = 0.0;
    double cost_per_mwh = 0.0;

    bool operator==(const Generator&) const = default;
};

struct ContingencySpec {
    enum class Kind { branch, generator };
    Kind kind = Kind::branch;
    int element_id = 0;

    bool operator==(const ContingencySpec&) const = default;
    std::string label() const;                   // "branch:35" / "gen:3"
    static ContingencySpec parse(const std::string& text);
};

/// Immutable snapshot of the grid. Structural invariants (unique ids, positive
/// reactance/rating, known endpoints) are enforced at construction; connectivity
/// and generation adequacy are checked by load_case / apply_load_profile only,
/// so post-outage copies may legally be disconnected.
class Network {
public:
    Network(double base_mva, int slack_bus, std::vector<Bus> buses,
            std::vector<Branch> branches, std::vector<Generator> generators);

    double base_mva() const { return base_mva_; }
    int slack_bus() const { return slack_bus_; }
    const std::vector<Bus>& buses() const { return buses_; }
    const std::vector<Branch>& branches() const { return branches_; }
    const std::vector<Generator>& generators() const { return generators_; }

    int bus_count() const { return static_cast<int>(buses_.size()); }
    int branch_count() const { return static_cast<int>(branches_.size()); }

    bool has_bus(int bus_id) const { return bus_index_.count(bus_id) != 0; }
    /// Dense 0-based index of a bus id (case order). Throws ValidationError.
    int bus_index(int bus_id) const;
    const Bus& bus(int bus_id) const { return buses_[bus_index(bus_id)]; }
    /// Branch by 1-based ordinal. Throws ValidationError on unknown ordinal.
    const Branch& branch(int branch_id) const;
    const Generator* find_generator(int gen_id) const;

    std::vector<int> in_service_branch_ids() const;
    int in_service_branch_count() const;
    double total_load_mw() const;
    double total_pmax_mw() const;

    /// True iff every bus is reachable over in-service branches.
    bool connected() const;

    bool operator==(const Network&) const;

private:
    double base_mva_;
    int slack_bus_;
    std::vector<Bus> buses_;
    std::vector<Branch> branches_;
    std::vector<Generator> generators_;
    std::unordered_map<int, int> bus_index_;
};

Network apply_load_profile(const Network& net, const std::map<int, double>& overrides_mw);
Network apply_branch_outage(const Network& net, int branch_id);
Network restore_branch(const Network& net, int branch_id);
Network apply_generator_outage(const Network& net, int gen_id);
Network apply_contingency(const Network& net, const ContingencySpec& spec);

}  // namespace gridswitch
