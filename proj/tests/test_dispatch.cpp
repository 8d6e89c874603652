#include <doctest.h>

#include <cmath>
#include <random>

#include "gridswitch/dispatch.hpp"
#include "gridswitch/errors.hpp"
#include "gridswitch/sensitivity.hpp"
#include "support/test_support.hpp"

using namespace gridswitch;
namespace gt = gridswitch::testing;

namespace {

void check_solution_invariants(const Network& net, const DispatchSolution& sol,
                               bool limits_enforced) {
    REQUIRE(sol.status == DispatchStatus::optimal);
    double total_gen = 0.0;
    for (size_t g = 0; g < net.generators().size(); ++g) {
        const Generator& gen = net.generators()[g];
        CHECK(sol.gen_mw[g] >= gen.pmin_mw - 1e-6);
        CHECK(sol.gen_mw[g] <= gen.pmax_mw + 1e-6);
        total_gen += sol.gen_mw[g];
    }
    double served = 0.0;
    for (int i = 0; i < net.bus_count(); ++i) {
        CHECK(sol.shed_mw[i] >= -1e-9);
        CHECK(sol.shed_mw[i] <= net.buses()[i].load_mw + 1e-9);
        served += net.buses()[i].load_mw - sol.shed_mw[i];
    }
    CHECK(std::abs(total_gen - served) <= 1e-6);
    if (limits_enforced) {
        for (const Branch& br : net.branches()) {
            if (!br.in_service) continue;
            CHECK(std::abs(sol.flows_mw[br.id - 1]) <= br.rating_mw + 1e-6);
        }
    }
    // nodal balance at every bus
    for (int i = 0; i < net.bus_count(); ++i) {
        double balance = -(net.buses()[i].load_mw - sol.shed_mw[i]);
        for (size_t g = 0; g < net.generators().size(); ++g) {
            if (net.bus_index(net.generators()[g].bus) == i) balance += sol.gen_mw[g];
        }
        for (const Branch& br : net.branches()) {
            if (!br.in_service) continue;
            if (net.bus_index(br.from_bus) == i) balance -= sol.flows_mw[br.id - 1];
            if (net.bus_index(br.to_bus) == i) balance += sol.flows_mw[br.id - 1];
        }
        CHECK(std::abs(balance) <= 1e-6);
    }
}

}  // namespace

TEST_CASE("39-bus base case dispatches with zero shed") {
    const Network net = gt::load_ieee39_table1();
    DispatchProblem dp(net);
    const DispatchSolution sol = solve_dispatch(dp);
    check_solution_invariants(net, sol, true);
    CHECK(sol.total_shed_mw == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("rating caps deliverable power on the two-bus net") {
    const Network net = gt::make_two_bus();
    DispatchProblem dp(net);
    const DispatchSolution sol = solve_dispatch(dp);
    check_solution_invariants(net, sol, true);
    CHECK(sol.gen_mw[0] == doctest::Approx(50.0));
    CHECK(sol.shed_mw[1] == doctest::Approx(30.0));
    CHECK(sol.total_shed_mw == doctest::Approx(30.0));

    SUBCASE("doubling the shed weight leaves the shed vector unchanged") {
        DispatchProblem heavier(net);
        heavier.shed_weight = dp.shed_weight * 2.0;
        const DispatchSolution sol2 = solve_dispatch(heavier);
        for (int i = 0; i < net.bus_count(); ++i) {
            CHECK(sol2.shed_mw[i] == doctest::Approx(sol.shed_mw[i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("shed weight must dominate generation cost") {
    DispatchProblem dp(gt::make_two_bus());
    dp.shed_weight = 0.5;
    CHECK_THROWS_AS(solve_dispatch(dp), ValidationError);
}

TEST_CASE("redispatch off requires and validates the fixation map") {
    const Network net = gt::make_two_bus();
    DispatchProblem dp(net);
    dp.allow_redispatch = false;
    CHECK_THROWS_AS(solve_dispatch(dp), ValidationError);

    dp.fixed_gen_mw = std::map<int, double>{{9, 10.0}};
    CHECK_THROWS_AS(solve_dispatch(dp), ValidationError);

    dp.fixed_gen_mw = std::map<int, double>{{1, 500.0}};  // above pmax
    CHECK_THROWS_AS(solve_dispatch(dp), ValidationError);
}

TEST_CASE("capped generators can back down but not up") {
    // Two buses, two generators; unit 2 is capped at 10 MW by the fixation.
    std::vector<Bus> buses = {{1, 0.0}, {2, 80.0}};
    std::vector<Branch> branches = {{1, 1, 2, 0.1, 100.0, true}};
    std::vector<Generator> gens = {{1, 1, 0.0, 100.0, 1.0}, {2, 2, 0.0, 100.0, 1.5}};
    const Network net(100.0, 1, buses, branches, gens);

    DispatchProblem dp(net);
    dp.allow_redispatch = false;
    dp.fixed_gen_mw = std::map<int, double>{{2, 10.0}};
    const DispatchSolution sol = solve_dispatch(dp);
    check_solution_invariants(net, sol, true);
    CHECK(sol.gen_mw[1] <= 10.0 + 1e-9);
    CHECK(sol.total_shed_mw == doctest::Approx(0.0));  // unit 1 is free and cheap
}

TEST_CASE("full shed cannot rescue an export-bound fixed unit") {
    // Fixed unit forced to 60 MW behind a 50 MW line with no local load.
    std::vector<Bus> buses = {{1, 0.0}, {2, 100.0}};
    std::vector<Branch> branches = {{1, 1, 2, 0.1, 50.0, true}};
    std::vector<Generator> gens = {{1, 1, 60.0, 80.0, 1.0}, {2, 2, 0.0, 100.0, 1.1}};
    const Network net(100.0, 2, buses, branches, gens);

    DispatchProblem dp(net);
    dp.allow_redispatch = false;
    dp.fixed_gen_mw = std::map<int, double>{{1, 70.0}};  // pmin 60 keeps it above the line cap
    const DispatchSolution sol = solve_dispatch(dp);
    CHECK(sol.status == DispatchStatus::infeasible);
}

TEST_CASE("disconnected dispatch throws") {
    Network cut = apply_branch_outage(gt::make_two_bus(), 1);
    DispatchProblem dp(cut);
    CHECK_THROWS_AS(solve_dispatch(dp), AnalysisError);
}

TEST_CASE("violation scan is strict and sorted") {
    const Network net = gt::make_triangle(100.0);

    SUBCASE("flows exactly at rating are clean") {
        CHECK(violation_check({100.0, -100.0, 100.0}, net, 0.0).empty());
    }
    SUBCASE("a single overload reports its percentage") {
        const auto v = violation_check({120.0, 0.0, 0.0}, net, 0.0);
        REQUIRE(v.size() == 1);
        CHECK(v[0].branch_id == 1);
        CHECK(v[0].overload_pct == doctest::Approx(20.0));
    }
    SUBCASE("results sort by overload severity") {
        const auto v = violation_check({110.0, -150.0, 120.0}, net, 0.0);
        REQUIRE(v.size() == 3);
        CHECK(v[0].branch_id == 2);
        CHECK(v[1].branch_id == 3);
        CHECK(v[2].branch_id == 1);
    }
    SUBCASE("tolerance fraction widens the band") {
        CHECK(violation_check({104.0, 0.0, 0.0}, net, 0.05).empty());
    }
}

TEST_CASE("fixed-injection flows after the branch-35 outage overload the published set") {
    const Network net = gt::load_ieee39_table1();
    DispatchProblem dp(net);
    const DispatchSolution base = solve_dispatch(dp);
    REQUIRE(base.status == DispatchStatus::optimal);

    const Network net_post = apply_branch_outage(net, 35);
    const auto inj = injections_from_dispatch(net, base.gen_mw);
    const auto flows = dc_power_flow(net_post, inj);
    const auto violations = violation_check(flows, net_post);

    std::vector<int> ids;
    for (const Violation& v : violations) ids.push_back(v.branch_id);
    std::sort(ids.begin(), ids.end());
    CHECK(ids == std::vector<int>{29, 36, 38});
}

TEST_CASE("uniform cost scaling leaves the shed vector unchanged") {
    std::mt19937 rng(99);
    int checked = 0;
    while (checked < 8) {
        const Network net = gt::random_network(rng, 4, 12);
        DispatchProblem dp(net);
        const DispatchSolution a = solve_dispatch(dp);
        if (a.status != DispatchStatus::optimal) continue;

        std::vector<Generator> scaled = net.generators();
        for (Generator& g : scaled) g.cost_per_mwh *= 1.7;
        const Network net2(net.base_mva(), net.slack_bus(), net.buses(), net.branches(), scaled);
        DispatchProblem dp2(net2);
        const DispatchSolution b = solve_dispatch(dp2);
        REQUIRE(b.status == DispatchStatus::optimal);
        for (int i = 0; i < net.bus_count(); ++i) {
            CHECK(std::abs(a.shed_mw[i] - b.shed_mw[i]) <= 1e-6);
        }
        ++checked;
    }
}

TEST_CASE("random dispatch solutions satisfy all stated invariants") {
    std::mt19937 rng(101);
    int checked = 0;
    while (checked < 10) {
        const Network net = gt::random_network(rng, 4, 15);
        DispatchProblem dp(net);
        const DispatchSolution sol = solve_dispatch(dp);
        if (sol.status != DispatchStatus::optimal) continue;
        check_solution_invariants(net, sol, true);
        ++checked;
    }
}
