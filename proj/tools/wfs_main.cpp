#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "wigner/dsl.hpp"
#include "wigner/report.hpp"
#include "wigner/scenarios.hpp"

namespace {

using namespace wigner;

Scenario load_scenario(const std::string& name) {
    if (name == "fr") return fr_scenario();
    if (name == "epr") return epr_wigner_scenario();
    if (name == "epr-dressed") return dressed_epr_scenario();
    std::ifstream in(name);
    if (!in) throw Error("cannot read scenario file '" + name + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string stem = name;
    if (auto slash = stem.find_last_of('/'); slash != std::string::npos) {
        stem = stem.substr(slash + 1);
    }
    if (auto dot = stem.find_last_of('.'); dot != std::string::npos) stem = stem.substr(0, dot);
    return parse_scenario(buf.str(), stem);
}

CollapsePolicy parse_policy(const std::string& text) {
    if (text == "H") return CollapsePolicy::policy_h();
    if (text == "universal") return CollapsePolicy::universal();
    if (text == "none") return CollapsePolicy::none();
    if (text.rfind("table=", 0) == 0) {
        std::string path = text.substr(6);
        std::ifstream in(path);
        if (!in) throw Error("cannot read policy table '" + path + "'");
        CollapsePolicy policy{PolicyKind::CustomTable, {}};
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
            std::istringstream row(line);
            std::string step, agent, flag;
            if (!(row >> step)) continue;  // blank line
            if (!(row >> agent >> flag) || (flag != "true" && flag != "false")) {
                throw Error("policy table '" + path + "', line " + std::to_string(line_no) +
                            ": expected '<step> <agent> <true|false>'");
            }
            std::string extra;
            if (row >> extra) {
                throw Error("policy table '" + path + "', line " + std::to_string(line_no) +
                            ": trailing input '" + extra + "'");
            }
            policy.table[{step, agent}] = flag == "true";
        }
        return policy;
    }
    throw Error("unknown policy '" + text + "' (expected H, universal, none, or table=<file>)");
}

void print_report(const Scenario& scenario, const RunReport& report, const std::string& format) {
    if (format == "json") {
        std::cout << to_json(scenario, report).dump(2) << "\n";
    } else {
        std::cout << render_text(scenario, report);
    }
}

int cmd_hardy(const std::string& source, double grid_degrees, const std::string& format) {
    Scenario scenario = load_scenario(source);
    HardyResult result = hardy_search(scenario.initial_state, grid_degrees);
    const double deg = 180.0 / M_PI;
    if (format == "json") {
        nlohmann::ordered_json out;
        out["scenario"] = scenario.name;
        out["settings_degrees"] = {{"a1", result.settings.a1 * deg},
                                   {"a2", result.settings.a2 * deg},
                                   {"b1", result.settings.b1 * deg},
                                   {"b2", result.settings.b2 * deg}};
        out["joint_probability"] = result.joint_probability;
        out["constraint_residuals"] = result.constraint_residuals;
        out["witness"] = result.witness();
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "scenario: " << scenario.name << "\n";
        std::cout << "settings (degrees): a1=" << format_probability(result.settings.a1 * deg)
                  << " a2=" << format_probability(result.settings.a2 * deg)
                  << " b1=" << format_probability(result.settings.b1 * deg)
                  << " b2=" << format_probability(result.settings.b2 * deg) << "\n";
        std::cout << "joint probability: " << format_probability(result.joint_probability) << "\n";
        std::cout << "constraint residuals: " << format_probability(result.constraint_residuals[0])
                  << " " << format_probability(result.constraint_residuals[1]) << " "
                  << format_probability(result.constraint_residuals[2]) << "\n";
        std::cout << "witness: " << (result.witness() ? "yes" : "no") << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulator for multi-agent sealed-lab quantum measurement scenarios"};
    app.require_subcommand(1);

    std::string source, policy_text = "H", format = "text";
    double grid_degrees = 1.0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("scenario", source, "Scenario file or builtin (fr, epr, epr-dressed)")
            ->required();
        cmd->add_option("--policy", policy_text, "Collapse policy: H, universal, none, table=<file>");
        cmd->add_option("--format", format, "Output format")
            ->check(CLI::IsMember({"text", "json"}));
    };
    CLI::App* run = app.add_subcommand("run", "Full report: branches, views, chains, checks");
    add_common(run);
    CLI::App* derive = app.add_subcommand("derive", "Certainty statements only");
    add_common(derive);
    CLI::App* check = app.add_subcommand("check", "Exit 2 when any contradiction is found");
    add_common(check);
    CLI::App* hardy = app.add_subcommand("hardy", "Hardy settings search on the initial state");
    hardy->add_option("scenario", source, "Scenario file or builtin")->required();
    hardy->add_option("--grid", grid_degrees, "Grid resolution in degrees");
    hardy->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (hardy->parsed()) return cmd_hardy(source, grid_degrees, format);
        Scenario scenario = load_scenario(source);
        CollapsePolicy policy = parse_policy(policy_text);
        RunReport report = build_report(scenario, policy);
        if (derive->parsed()) {
            report.branches.clear();
            report.contradictions.clear();
        }
        print_report(scenario, report, format);
        if (check->parsed() && !report.contradictions.empty()) return 2;
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
