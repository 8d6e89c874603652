#include "gridswitch/case_io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "gridswitch/errors.hpp"

namespace gridswitch {
namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw ValidationError("missing '" + std::string(key) + "' in " + where);
    }
    return obj.at(key);
}

double require_number(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_number()) {
        throw ValidationError("'" + std::string(key) + "' must be a number in " + where);
    }
    return v.get<double>();
}

int require_int(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_number_integer()) {
        throw ValidationError("'" + std::string(key) + "' must be an integer in " + where);
    }
    return v.get<int>();
}

}  // namespace

Network load_case(const json& doc) {
    if (!doc.is_object()) throw ValidationError("case document must be a JSON object");
    const double base_mva = require_number(doc, "base_mva", "case");
    const int slack_bus = require_int(doc, "slack_bus", "case");

    const json& jbuses = require(doc, "buses", "case");
    if (!jbuses.is_array() || jbuses.empty()) throw ValidationError("'buses' must be a non-empty array");
    std::vector<Bus> buses;
    buses.reserve(jbuses.size());
    for (size_t i = 0; i < jbuses.size(); ++i) {
        const std::string where = "buses[" + std::to_string(i) + "]";
        Bus b;
        b.id = require_int(jbuses[i], "id", where);
        b.load_mw = require_number(jbuses[i], "load_mw", where);
        buses.push_back(b);
    }

    const json& jbranches = require(doc, "branches", "case");
    if (!jbranches.is_array()) throw ValidationError("'branches' must be an array");
    std::vector<Branch> branches;
    branches.reserve(jbranches.size());
    for (size_t i = 0; i < jbranches.size(); ++i) {
        const std::string where = "branches[" + std::to_string(i) + "]";
        Branch br;
        br.id = static_cast<int>(i + 1);
        br.from_bus = require_int(jbranches[i], "from", where);
        br.to_bus = require_int(jbranches[i], "to", where);
        br.reactance_pu = require_number(jbranches[i], "x_pu", where);
        br.rating_mw = require_number(jbranches[i], "rating_mw", where);
        if (jbranches[i].contains("in_service")) {
            const json& flag = jbranches[i].at("in_service");
            if (!flag.is_boolean()) throw ValidationError("'in_service' must be a boolean in " + where);
            br.in_service = flag.get<bool>();
        }
        branches.push_back(br);
    }

    const json& jgens = require(doc, "generators", "case");
    if (!jgens.is_array()) throw ValidationError("'generators' must be an array");
    std::vector<Generator> gens;
    gens.reserve(jgens.size());
    for (size_t i = 0; i < jgens.size(); ++i) {
        const std::string where = "generators[" + std::to_string(i) + "]";
        Generator g;
        g.id = require_int(jgens[i], "id", where);
        g.bus = require_int(jgens[i], "bus", where);
        g.pmin_mw = require_number(jgens[i], "pmin_mw", where);
        g.pmax_mw = require_number(jgens[i], "pmax_mw", where);
        g.cost_per_mwh = require_number(jgens[i], "cost_per_mwh", where);
        gens.push_back(g);
    }

    Network net(base_mva, slack_bus, std::move(buses), std::move(branches), std::move(gens));
    if (!net.connected()) {
        // name one unreachable bus to make the report actionable
        std::vector<char> seen(net.bus_count(), 0);
        std::vector<int> stack = {0};
        seen[0] = 1;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (const Branch& br : net.branches()) {
                if (!br.in_service) continue;
                const int f = net.bus_index(br.from_bus);
                const int t = net.bus_index(br.to_bus);
                if (f == u && !seen[t]) { seen[t] = 1; stack.push_back(t); }
                if (t == u && !seen[f]) { seen[f] = 1; stack.push_back(f); }
            }
        }
        for (int i = 0; i < net.bus_count(); ++i) {
            if (!seen[i]) {
                throw ValidationError("disconnected graph, bus " +
                                      std::to_string(net.buses()[i].id));
            }
        }
        throw ValidationError("disconnected graph");
    }
    if (net.total_pmax_mw() < net.total_load_mw()) {
        throw ValidationError("total generation capacity below total load");
    }
    return net;
}

Network load_case_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open case file '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ValidationError("case file '" + path + "': " + e.what());
    }
    return load_case(doc);
}

json serialize_case(const Network& net) {
    json doc;
    doc["base_mva"] = net.base_mva();
    doc["slack_bus"] = net.slack_bus();
    json jbuses = json::array();
    for (const Bus& b : net.buses()) {
        jbuses.push_back({{"id", b.id}, {"load_mw", b.load_mw}});
    }
    doc["buses"] = std::move(jbuses);
    json jbranches = json::array();
    for (const Branch& br : net.branches()) {
        json j = {{"from", br.from_bus}, {"to", br.to_bus}, {"x_pu", br.reactance_pu},
                  {"rating_mw", br.rating_mw}};
        if (!br.in_service) j["in_service"] = false;
        jbranches.push_back(std::move(j));
    }
    doc["branches"] = std::move(jbranches);
    json jgens = json::array();
    for (const Generator& g : net.generators()) {
        jgens.push_back({{"id", g.id}, {"bus", g.bus}, {"pmin_mw", g.pmin_mw},
                         {"pmax_mw", g.pmax_mw}, {"cost_per_mwh", g.cost_per_mwh}});
    }
    doc["generators"] = std::move(jgens);
    return doc;
}

std::map<int, double> parse_profile_csv(const std::string& text) {
    std::map<int, double> overrides;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        if (!std::isdigit(static_cast<unsigned char>(line[start])) && line[start] != '-') {
            continue;  // header or comment row
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ValidationError("load profile line " + std::to_string(lineno) +
                                  ": expected 'bus,load_mw'");
        }
        try {
            const int bus = std::stoi(line.substr(start, comma - start));
            const double load = std::stod(line.substr(comma + 1));
            if (!overrides.emplace(bus, load).second) {
                throw ValidationError("load profile line " + std::to_string(lineno) +
                                      ": duplicate bus " + std::to_string(bus));
            }
        } catch (const ValidationError&) {
            throw;
        } catch (const std::exception&) {
            throw ValidationError("load profile line " + std::to_string(lineno) +
                                  ": expected 'bus,load_mw'");
        }
    }
    return overrides;
}

std::map<int, double> load_profile_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open load profile '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_profile_csv(buf.str());
}

}  // namespace gridswitch
