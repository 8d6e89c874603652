#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gridswitch/case_io.hpp"
#include "gridswitch/contingency.hpp"
#include "gridswitch/errors.hpp"
#include "gridswitch/report.hpp"

namespace {

using namespace gridswitch;

struct CommonOptions {
    std::string case_path;
    std::string loads_path;
    std::string contingency;
    std::string output;  // per-command default when empty
    std::string out_path;
    std::string lodf_basis = "post";
    int top_k = 10;
    double lbr_threshold = 0.95;
    double shed_weight = 10000.0;
    bool stop_at_zero_shed = false;
    bool no_timing = false;
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool needs_contingency) {
    cmd->add_option("--case", opt.case_path, "case JSON file")->required();
    cmd->add_option("--loads", opt.loads_path, "load override CSV (bus,load_mw)");
    auto* c = cmd->add_option("--contingency", opt.contingency, "branch:N or gen:N");
    if (needs_contingency) c->required();
    cmd->add_option("--top-k", opt.top_k, "LODF candidates to evaluate")->capture_default_str();
    cmd->add_option("--lbr-threshold", opt.lbr_threshold, "limit-branch loading fraction")
        ->capture_default_str();
    cmd->add_option("--shed-weight", opt.shed_weight, "load shed penalty ($/MWh)")
        ->capture_default_str();
    cmd->add_option("--lodf-basis", opt.lodf_basis, "LODF topology basis")
        ->check(CLI::IsMember({"pre", "post"}))
        ->capture_default_str();
    cmd->add_flag("--stop-at-zero-shed", opt.stop_at_zero_shed,
                  "stop evaluating candidates at the first zero-shed one");
    cmd->add_option("--output", opt.output, "output format (default table; bilevel: json)")
        ->check(CLI::IsMember({"table", "json", "csv"}));
    cmd->add_option("--out", opt.out_path, "write output to a file instead of stdout");
    cmd->add_flag("--no-timing", opt.no_timing, "report zero wall times (deterministic output)");
}

Network load_network(const CommonOptions& opt) {
    Network net = load_case_file(opt.case_path);
    if (!opt.loads_path.empty()) {
        net = apply_load_profile(net, load_profile_csv(opt.loads_path));
    }
    return net;
}

BilevelConfig make_config(const CommonOptions& opt) {
    BilevelConfig cfg;
    cfg.lbr_loading_frac = opt.lbr_threshold;
    cfg.top_k = opt.top_k;
    cfg.shed_weight = opt.shed_weight;
    cfg.stop_at_zero_shed = opt.stop_at_zero_shed;
    cfg.lodf_basis = opt.lodf_basis == "pre" ? LodfBasis::pre : LodfBasis::post;
    return cfg;
}

OutputFormat parse_format(const std::string& name) {
    if (name == "json") return OutputFormat::json;
    if (name == "csv") return OutputFormat::csv;
    return OutputFormat::table;
}

void write_output(const CommonOptions& opt, const std::string& text) {
    if (opt.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(opt.out_path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + opt.out_path + "'");
    out << text;
}

int cmd_bilevel(const CommonOptions& opt) {
    const Network net = load_network(opt);
    BilevelReport report =
        run_bilevel(net, ContingencySpec::parse(opt.contingency), make_config(opt));
    if (opt.no_timing) report.timings = PhaseTimings{};

    const OutputFormat format =
        opt.output.empty() ? OutputFormat::json : parse_format(opt.output);
    std::string text;
    if (format == OutputFormat::json) {
        text = to_json(report, !opt.no_timing).dump(2) + "\n";
    } else if (format == OutputFormat::csv) {
        text = evaluations_to_csv(report.candidates);
    } else {
        text = evaluations_to_table(report.candidates);
    }
    write_output(opt, text);
    return 0;
}

int cmd_baseline(const CommonOptions& opt, const std::string& method, const std::string& mode,
                 int n) {
    const Network net = load_network(opt);
    const ContingencySpec contingency = ContingencySpec::parse(opt.contingency);
    const BilevelConfig cfg = make_config(opt);

    if (method != "ce" && contingency.kind != ContingencySpec::Kind::branch) {
        throw ValidationError(method + " requires a branch contingency");
    }
    if (method != "ce" && mode == "redispatch") {
        throw ValidationError(method + " evaluates fixed injections only");
    }

    DispatchProblem base_problem(net);
    base_problem.shed_weight = cfg.shed_weight;
    const DispatchSolution base = solve_dispatch(base_problem);
    if (base.status != DispatchStatus::optimal) throw AnalysisError("infeasible base case");

    const Network net_post = apply_contingency(net, contingency);
    const std::vector<double> injections = injections_from_dispatch(net, base.gen_mw);

    std::vector<CandidateEvaluation> evals;
    if (method == "ce") {
        evals = complete_enumeration(
            net_post, mode == "redispatch" ? EnumerationMode::redispatch : EnumerationMode::fixed,
            cfg, &injections);
    } else {
        std::vector<int> candidates;
        if (method == "cbce") {
            candidates = baseline_cbce(net_post, contingency.element_id, n);
        } else {
            const std::vector<Violation> violations = violation_check(
                dc_power_flow_slack_balanced(net_post, injections), net_post);
            if (violations.empty()) {
                throw AnalysisError("no post-contingency violations; CBVE has no target");
            }
            candidates = baseline_cbve(net_post, violations, n);
        }
        evals = baseline_evaluate_fixed(net_post, candidates, injections);
    }

    std::string text;
    if (opt.output == "json") {
        nlohmann::json j;
        j["method"] = method;
        j["contingency"] = contingency.label();
        nlohmann::json arr = nlohmann::json::array();
        for (const CandidateEvaluation& ev : evals) arr.push_back(to_json(ev));
        j["evaluations"] = std::move(arr);
        text = j.dump(2) + "\n";
    } else if (opt.output == "csv") {
        text = evaluations_to_csv(evals);
    } else {
        text = evaluations_to_table(evals);
    }
    write_output(opt, text);
    return 0;
}

int cmd_scenario(const CommonOptions& opt, char which) {
    const Network net = load_network(opt);
    const ContingencySpec contingency = ContingencySpec::parse(opt.contingency);
    const BilevelConfig cfg = make_config(opt);
    ScenarioReport row;
    switch (which) {
        case 'a': row = run_scenario_a(net, contingency, cfg); break;
        case 'b': row = run_scenario_b(net, contingency, cfg); break;
        default: row = run_scenario_c(net, contingency, cfg); break;
    }
    if (opt.no_timing) row.wall_time_s = 0.0;
    write_output(opt, emit_table({row}, parse_format(opt.output)));
    return 0;
}

int cmd_screen(const CommonOptions& opt) {
    const Network net = load_network(opt);
    ScreenConfig cfg;
    cfg.shed_weight = opt.shed_weight;
    const std::vector<ScreeningRow> rows = screen_n1(net, cfg);
    std::string text;
    if (opt.output == "json") {
        text = screen_to_json(rows).dump(2) + "\n";
    } else if (opt.output == "csv") {
        text = screen_to_csv(rows);
    } else {
        text = screen_to_table(rows);
    }
    write_output(opt, text);
    return 0;
}

int cmd_matrix(const CommonOptions& opt, bool lodf_matrix) {
    Network net = load_network(opt);
    if (!opt.contingency.empty()) {
        net = apply_contingency(net, ContingencySpec::parse(opt.contingency));
        if (!net.connected()) throw AnalysisError("post-contingency network is islanded");
    }
    const PtdfMatrix ptdf = compute_ptdf(net);
    std::string text;
    if (lodf_matrix) {
        text = lodf_to_csv(compute_lodf(ptdf, net));
    } else {
        text = ptdf_to_csv(ptdf, net);
    }
    write_output(opt, text);
    return 0;
}

int run(int argc, char** argv) {
    CLI::App app{"Transmission-switching contingency analysis"};
    app.require_subcommand(1);

    CommonOptions opt;
    std::string method = "cbce";
    std::string mode = "fixed";
    int n_candidates = 10;

    CLI::App* bilevel = app.add_subcommand("bilevel", "LODF-guided switching selection");
    add_common(bilevel, opt, true);

    CLI::App* baseline = app.add_subcommand("baseline", "CBCE/CBVE/CE candidate evaluation");
    add_common(baseline, opt, true);
    baseline->add_option("--method", method, "cbce, cbve or ce")
        ->check(CLI::IsMember({"cbce", "cbve", "ce"}))
        ->required();
    baseline->add_option("--mode", mode, "ce evaluation mode")
        ->check(CLI::IsMember({"fixed", "redispatch"}))
        ->capture_default_str();
    baseline->add_option("--n", n_candidates, "candidate list length")->capture_default_str();

    CLI::App* sa = app.add_subcommand("scenario-a", "shedding without re-dispatch");
    add_common(sa, opt, true);
    CLI::App* sb = app.add_subcommand("scenario-b", "shedding with re-dispatch");
    add_common(sb, opt, true);
    CLI::App* sc = app.add_subcommand("scenario-c", "shedding, re-dispatch and CE switching");
    add_common(sc, opt, true);

    CLI::App* screen = app.add_subcommand("screen", "N-1 screening table");
    add_common(screen, opt, false);

    CLI::App* lodf = app.add_subcommand("lodf", "dump the LODF matrix as CSV");
    add_common(lodf, opt, false);
    CLI::App* ptdf = app.add_subcommand("ptdf", "dump the PTDF matrix as CSV");
    add_common(ptdf, opt, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (bilevel->parsed()) return cmd_bilevel(opt);
    if (baseline->parsed()) return cmd_baseline(opt, method, mode, n_candidates);
    if (sa->parsed()) return cmd_scenario(opt, 'a');
    if (sb->parsed()) return cmd_scenario(opt, 'b');
    if (sc->parsed()) return cmd_scenario(opt, 'c');
    if (screen->parsed()) return cmd_screen(opt);
    if (lodf->parsed()) return cmd_matrix(opt, true);
    return cmd_matrix(opt, false);
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const AnalysisError& e) {
        std::cerr << "analysis error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
