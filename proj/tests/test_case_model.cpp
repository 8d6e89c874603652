#include <doctest.h>

#include <random>

#include "gridswitch/case_io.hpp"
#include "gridswitch/errors.hpp"
#include "support/test_support.hpp"

using namespace gridswitch;
namespace gt = gridswitch::testing;
using nlohmann::json;

namespace {

json triangle_doc() {
    return json::parse(R"({
        "base_mva": 100.0,
        "slack_bus": 1,
        "buses": [{"id": 1, "load_mw": 0.0}, {"id": 2, "load_mw": 0.0}, {"id": 3, "load_mw": 100.0}],
        "branches": [
            {"from": 1, "to": 2, "x_pu": 0.1, "rating_mw": 150.0},
            {"from": 1, "to": 3, "x_pu": 0.1, "rating_mw": 150.0},
            {"from": 2, "to": 3, "x_pu": 0.1, "rating_mw": 150.0}
        ],
        "generators": [{"id": 1, "bus": 1, "pmin_mw": 0.0, "pmax_mw": 200.0, "cost_per_mwh": 1.0}]
    })");
}

}  // namespace

TEST_CASE("triangle document loads with ordinals in file order") {
    const Network net = load_case(triangle_doc());
    CHECK(net.branch_count() == 3);
    CHECK(net.branch(1).from_bus == 1);
    CHECK(net.branch(1).to_bus == 2);
    CHECK(net.bus(3).load_mw == doctest::Approx(100.0));
}

TEST_CASE("bundled 39-bus case matches its published shape") {
    const Network net = gt::load_ieee39();
    CHECK(net.bus_count() == 39);
    CHECK(net.branch_count() == 46);
    CHECK(net.generators().size() == 10);
    CHECK(net.slack_bus() == 31);
    CHECK(net.branch(35).from_bus == 21);
    CHECK(net.branch(35).to_bus == 22);
}

TEST_CASE("nonpositive reactance is rejected with the branch ordinal") {
    json doc = triangle_doc();
    doc["branches"][1]["x_pu"] = 0.0;
    CHECK_THROWS_WITH_AS(load_case(doc), doctest::Contains("nonpositive reactance, branch 2"),
                         ValidationError);
}

TEST_CASE("schema violations are rejected") {
    json doc = triangle_doc();
    doc.erase("slack_bus");
    CHECK_THROWS_AS(load_case(doc), ValidationError);

    doc = triangle_doc();
    doc["branches"][0].erase("x_pu");
    CHECK_THROWS_AS(load_case(doc), ValidationError);

    doc = triangle_doc();
    doc["buses"][1]["id"] = 1;  // duplicate
    CHECK_THROWS_WITH_AS(load_case(doc), doctest::Contains("duplicate bus id 1"), ValidationError);

    doc = triangle_doc();
    doc["branches"][2]["rating_mw"] = -5.0;
    CHECK_THROWS_WITH_AS(load_case(doc), doctest::Contains("nonpositive rating, branch 3"),
                         ValidationError);

    doc = triangle_doc();
    doc["generators"][0]["pmin_mw"] = 300.0;
    CHECK_THROWS_AS(load_case(doc), ValidationError);
}

TEST_CASE("disconnected documents are rejected with a bus id") {
    json doc = triangle_doc();
    doc["buses"].push_back({{"id", 4}, {"load_mw", 0.0}});
    CHECK_THROWS_WITH_AS(load_case(doc), doctest::Contains("disconnected graph, bus 4"),
                         ValidationError);
}

TEST_CASE("generation short of load is rejected") {
    json doc = triangle_doc();
    doc["buses"][2]["load_mw"] = 500.0;
    CHECK_THROWS_WITH_AS(load_case(doc), doctest::Contains("capacity"), ValidationError);
}

TEST_CASE("load profile replaces listed buses only") {
    const Network base = gt::load_ieee39();
    const Network net = apply_load_profile(
        base, load_profile_csv(gt::data_path("table1.csv")));
    CHECK(net.bus(20).load_mw == doctest::Approx(610.2));
    CHECK(net.bus(39).load_mw == doctest::Approx(1150.9));
    CHECK(net.bus(1).load_mw == doctest::Approx(0.0));

    const double expected_total = 6229.7877;
    CHECK(net.total_load_mw() == doctest::Approx(expected_total).epsilon(1e-9));

    SUBCASE("empty override map is the identity") {
        CHECK(apply_load_profile(base, {}) == base);
    }
    SUBCASE("unknown bus is rejected") {
        CHECK_THROWS_WITH_AS(apply_load_profile(base, {{99, 5.0}}),
                             doctest::Contains("unknown bus 99"), ValidationError);
    }
}

TEST_CASE("branch outage keeps ordinals and clears on restore") {
    const Network net = gt::load_ieee39();
    const Network out = apply_branch_outage(net, 35);
    CHECK(out.in_service_branch_count() == 45);
    CHECK(out.branch_count() == 46);
    CHECK_FALSE(out.branch(35).in_service);

    SUBCASE("restoring the branch recovers the original network") {
        CHECK(restore_branch(out, 35) == net);
    }
    SUBCASE("double outage is rejected") {
        CHECK_THROWS_AS(apply_branch_outage(out, 35), ValidationError);
    }
    SUBCASE("unknown ordinal is rejected") {
        CHECK_THROWS_WITH_AS(apply_branch_outage(net, 999), doctest::Contains("unknown branch 999"),
                             ValidationError);
    }
}

TEST_CASE("triangle stays connected after one outage") {
    const Network net = gt::make_triangle();
    const Network out = apply_branch_outage(net, 1);
    CHECK(out.in_service_branch_count() == 2);
    CHECK(out.connected());
}

TEST_CASE("generator outages remove units") {
    std::vector<Bus> buses = {{1, 0.0}, {2, 50.0}};
    std::vector<Branch> branches = {{1, 1, 2, 0.1, 100.0, true}};
    std::vector<Generator> gens = {{1, 1, 0.0, 60.0, 1.0}, {2, 1, 0.0, 60.0, 1.0}};
    const Network net(100.0, 1, buses, branches, gens);

    const Network one = apply_generator_outage(net, 2);
    CHECK(one.generators().size() == 1);
    CHECK(one.generators()[0].id == 1);

    const Network none = apply_generator_outage(one, 1);
    CHECK(none.generators().empty());

    CHECK_THROWS_WITH_AS(apply_generator_outage(net, 9), doctest::Contains("unknown generator 9"),
                         ValidationError);
}

TEST_CASE("serialize/load round-trips equal networks") {
    CHECK(load_case(serialize_case(load_case(triangle_doc()))) == load_case(triangle_doc()));

    const Network fixture = gt::load_ieee39_table1();
    CHECK(load_case(serialize_case(fixture)) == fixture);

    std::mt19937 rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        Network net = gt::random_network(rng);
        // give it enough capacity to satisfy load_case validation
        CHECK(load_case(serialize_case(net)) == net);
    }
}

TEST_CASE("out-of-service branches survive the round trip") {
    const Network out = apply_branch_outage(gt::load_ieee39(), 35);
    const Network back = load_case(serialize_case(out));
    CHECK_FALSE(back.branch(35).in_service);
    CHECK(back == out);
}

TEST_CASE("profile csv parsing") {
    const auto overrides = parse_profile_csv("bus,load_mw\n3,342.88\n4,546.57\n");
    CHECK(overrides.size() == 2);
    CHECK(overrides.at(3) == doctest::Approx(342.88));

    CHECK_THROWS_AS(parse_profile_csv("3;42\n"), ValidationError);
    CHECK_THROWS_AS(parse_profile_csv("3,1.0\n3,2.0\n"), ValidationError);
    CHECK(parse_profile_csv("").empty());
}

TEST_CASE("contingency spec parsing") {
    const ContingencySpec b = ContingencySpec::parse("branch:35");
    CHECK(b.kind == ContingencySpec::Kind::branch);
    CHECK(b.element_id == 35);
    CHECK(b.label() == "branch:35");

    const ContingencySpec g = ContingencySpec::parse("gen:3");
    CHECK(g.kind == ContingencySpec::Kind::generator);
    CHECK(g.label() == "gen:3");

    CHECK_THROWS_AS(ContingencySpec::parse("line:3"), ValidationError);
    CHECK_THROWS_AS(ContingencySpec::parse("branch:"), ValidationError);
    CHECK_THROWS_AS(ContingencySpec::parse("branch:3x"), ValidationError);
}
