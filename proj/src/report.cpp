#include "wigner/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace wigner {

namespace {

std::string fmt12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

std::vector<std::string> product_labels(const SpaceRegistry& registry) {
    std::vector<std::string> labels;
    for (int flat = 0; flat < registry.total_dimension(); ++flat) {
        std::vector<int> digits = registry.digits_of(flat);
        std::string label;
        for (int i = 0; i < registry.size(); ++i) {
            if (i) label += ",";
            label += registry.subsystems()[i].labels[digits[i]];
        }
        labels.push_back(std::move(label));
    }
    return labels;
}

std::string event_text(const Event& e) { return e.step + "=" + e.label; }

std::string condition_text(const std::vector<Event>& condition) {
    std::string out;
    for (size_t i = 0; i < condition.size(); ++i) {
        if (i) out += ", ";
        out += event_text(condition[i]);
    }
    return out;
}

nlohmann::ordered_json event_json(const Event& e) {
    return {{"step", e.step}, {"outcome", e.label}};
}

nlohmann::ordered_json amplitudes_json(const Vector& v) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (int i = 0; i < v.size(); ++i) {
        out.push_back({v[i].real(), v[i].imag()});
    }
    return out;
}

}  // namespace

std::string policy_name(const CollapsePolicy& policy) {
    switch (policy.kind) {
        case PolicyKind::PolicyH: return "H";
        case PolicyKind::UniversalCollapse: return "universal";
        case PolicyKind::NoCollapse: return "none";
        case PolicyKind::CustomTable: return "table";
    }
    return "?";
}

RunReport build_report(const Scenario& scenario, const CollapsePolicy& policy) {
    RunReport report;
    report.scenario = scenario.name;
    report.policy = policy_name(policy);
    report.branches = enumerate_branches(scenario, policy);
    report.statements = derive_certainty_chain(scenario, policy);
    report.contradictions =
        detect_contradictions(scenario, policy, report.statements, report.branches);
    return report;
}

std::string as_rational(double x) {
    for (long q = 1; q <= 144; ++q) {
        double scaled = x * static_cast<double>(q);
        long p = std::lround(scaled);
        if (std::abs(scaled - static_cast<double>(p)) <= 1e-9 * q) {
            if (q == 1) return std::to_string(p);
            // Only report reduced fractions so each value has one spelling.
            long a = std::abs(p), b = q;
            while (b) { long t = a % b; a = b; b = t; }
            if (a > 1) continue;
            return std::to_string(p) + "/" + std::to_string(q);
        }
    }
    return "";
}

std::string format_probability(double x) {
    std::string out = fmt12(x);
    std::string rational = as_rational(x);
    if (!rational.empty() && rational != out) out += " (" + rational + ")";
    return out;
}

std::string render_text(const Scenario& scenario, const RunReport& report) {
    std::ostringstream out;
    out << "scenario: " << report.scenario << "\n";
    out << "policy: " << report.policy << "\n";
    std::vector<std::string> basis = product_labels(*scenario.registry);

    out << "branches (" << report.branches.size() << "):\n";
    for (const auto& branch : report.branches) {
        out << "  (";
        bool first = true;
        for (const auto& [step, outcome] : branch.outcomes) {
            if (!first) out << ", ";
            first = false;
            out << step << "=" << outcome;
        }
        out << ")  mass " << format_probability(branch.bookkeeper_probability) << "\n";
        for (const auto& [agent, view] : branch.views) {
            out << "    view " << agent << ":";
            for (int i = 0; i < view.state.amplitudes.size(); ++i) {
                Amplitude a = view.state.amplitudes[i];
                if (std::abs(a) < kZeroTol) continue;
                out << " " << fmt12(a.real());
                if (std::abs(a.imag()) >= kZeroTol) {
                    out << (a.imag() < 0 ? "-" : "+") << fmt12(std::abs(a.imag())) << "i";
                }
                out << "*|" << basis[i] << ">";
            }
            out << "\n";
        }
    }

    out << "certainty statements (" << report.statements.size() << "):\n";
    for (const auto& s : report.statements) {
        out << "  " << s.agent << ": " << condition_text(s.condition) << " => "
            << event_text(s.target) << "  p=" << format_probability(s.probability)
            << (s.derivation == Derivation::Chained ? "  [chained" : "  [direct");
        if (!s.chain.empty()) {
            out << ": ";
            for (size_t i = 0; i < s.chain.size(); ++i) {
                if (i) out << " ; ";
                out << s.chain[i];
            }
        }
        out << "]\n";
    }

    out << "contradictions (" << report.contradictions.size() << "):\n";
    for (const auto& c : report.contradictions) {
        if (c.kind == ContradictionKind::BranchViolation) {
            out << "  branch-violation of " << c.statement.agent << ": "
                << condition_text(c.statement.condition) << " => " << event_text(c.statement.target)
                << "  branch (";
            bool first = true;
            for (const auto& [step, outcome] : c.branch_outcomes) {
                if (!first) out << ", ";
                first = false;
                out << step << "=" << outcome;
            }
            out << ")  mass " << format_probability(c.branch_mass) << "\n";
        } else {
            out << "  view-disagreement on " << c.statement.agent << ": "
                << condition_text(c.statement.condition) << " => " << event_text(c.statement.target)
                << "  vs view of " << c.view_agent << "  p="
                << format_probability(c.statement_probability)
                << " vs " << format_probability(c.view_probability) << "\n";
        }
    }
    return out.str();
}

nlohmann::ordered_json to_json(const Scenario& scenario, const RunReport& report) {
    nlohmann::ordered_json out;
    out["scenario"] = report.scenario;
    out["policy"] = report.policy;
    out["basis"] = product_labels(*scenario.registry);

    auto branches = nlohmann::ordered_json::array();
    for (const auto& branch : report.branches) {
        nlohmann::ordered_json b;
        b["outcomes"] = nlohmann::ordered_json(branch.outcomes);
        b["mass"] = branch.bookkeeper_probability;
        auto views = nlohmann::ordered_json::object();
        for (const auto& [agent, view] : branch.views) {
            views[agent] = {{"amplitudes", amplitudes_json(view.state.amplitudes)}};
        }
        b["views"] = std::move(views);
        branches.push_back(std::move(b));
    }
    out["branches"] = std::move(branches);

    auto statements = nlohmann::ordered_json::array();
    for (const auto& s : report.statements) {
        nlohmann::ordered_json j;
        j["agent"] = s.agent;
        auto condition = nlohmann::ordered_json::array();
        for (const auto& e : s.condition) condition.push_back(event_json(e));
        j["condition"] = std::move(condition);
        j["target"] = event_json(s.target);
        j["probability"] = s.probability;
        j["derivation"] = s.derivation == Derivation::Chained ? "chained" : "direct";
        j["chain"] = s.chain;
        statements.push_back(std::move(j));
    }
    out["statements"] = std::move(statements);

    auto contradictions = nlohmann::ordered_json::array();
    for (const auto& c : report.contradictions) {
        nlohmann::ordered_json j;
        j["kind"] =
            c.kind == ContradictionKind::BranchViolation ? "branch-violation" : "view-disagreement";
        j["agent"] = c.statement.agent;
        auto condition = nlohmann::ordered_json::array();
        for (const auto& e : c.statement.condition) condition.push_back(event_json(e));
        j["condition"] = std::move(condition);
        j["target"] = event_json(c.statement.target);
        if (c.kind == ContradictionKind::BranchViolation) {
            j["branch"] = nlohmann::ordered_json(c.branch_outcomes);
            j["mass"] = c.branch_mass;
        } else {
            j["view_agent"] = c.view_agent;
            j["statement_probability"] = c.statement_probability;
            j["view_probability"] = c.view_probability;
        }
        contradictions.push_back(std::move(j));
    }
    out["contradictions"] = std::move(contradictions);
    return out;
}

}  // namespace wigner
