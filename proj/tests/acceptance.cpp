// Acceptance suite: one PASS/FAIL line per criterion, exit 0 only if all pass.
//
// Usage: acceptance <path-to-wfs-binary> <path-to-scenario-dir>

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "random_scenario.hpp"
#include "wigner/dsl.hpp"
#include "wigner/inference.hpp"
#include "wigner/scenarios.hpp"

using namespace wigner;

namespace {

std::string g_binary;
std::string g_scenario_dir;
int g_failures = 0;

void criterion(int number, const std::string& title, const std::function<bool()>& body) {
    bool ok = false;
    std::string note;
    try {
        ok = body();
    } catch (const std::exception& e) {
        note = std::string(" (") + e.what() + ")";
    }
    std::printf("%s  %2d. %s%s\n", ok ? "PASS" : "FAIL", number, title.c_str(), note.c_str());
    if (!ok) ++g_failures;
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

StateVector joint_state_before_s4() {
    Scenario fr = fr_scenario();
    const auto& prep = std::get<PrepareStep>(fr.steps[1]);
    Vector amps = apply_prepare(*fr.registry, prep, fr.initial_state.amplitudes);
    return make_state(fr.registry, std::move(amps));
}

int run_command(const std::string& args, std::string* output = nullptr) {
    std::string cmd = g_binary + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return -1;
    std::array<char, 4096> buf;
    size_t n;
    std::string out;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    if (output) *output = out;
    int status = pclose(pipe);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// ---------------------------------------------------------------------------

bool expansion_coefficients() {
    StateVector psi = joint_state_before_s4();

    Scenario fr = fr_scenario();
    const MeasurementBasis& coin_basis = fr.measure_step("s4").basis;  // ob, fb
    const MeasurementBasis& spin_basis = fr.measure_step("s6").basis;  // o, f
    auto coefs = rewrite_in_basis(psi, {coin_basis, spin_basis});
    if (coefs.size() != 4) return false;

    const double inv2s3 = 1.0 / (2.0 * std::sqrt(3.0));
    const std::array<double, 4> expected = {inv2s3, -inv2s3, inv2s3, std::sqrt(3.0) / 2.0};
    const std::array<double, 4> masses = {1.0 / 12.0, 1.0 / 12.0, 1.0 / 12.0, 0.75};
    for (int k = 0; k < 4; ++k) {
        if (!close(coefs[k].second.real(), expected[k], 1e-12)) return false;
        if (!close(coefs[k].second.imag(), 0.0, 1e-12)) return false;
        if (!close(std::norm(coefs[k].second), masses[k], 1e-12)) return false;
    }
    if (coefs[0].first != std::vector<std::string>{"ob", "o"}) return false;

    // Independent brute-force oracle on raw arrays, no library calls:
    // psi over (coin, spin) = (0, r, r, r) with r = 1/sqrt(3); frame vectors
    // written out digit by digit.
    const double r = 1.0 / std::sqrt(3.0);
    const double psi_raw[2][2] = {{0.0, r}, {r, r}};  // [coin][spin], hd/tu/td
    const double s = 1.0 / std::sqrt(2.0);
    const double coin_kets[2][2] = {{s, -s}, {s, s}};   // ob, fb over (h, t)
    const double spin_kets[2][2] = {{-s, s}, {s, s}};   // o, f over (u, d)
    int k = 0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j, ++k) {
            double oracle = 0.0;
            for (int c = 0; c < 2; ++c) {
                for (int sp = 0; sp < 2; ++sp) {
                    oracle += coin_kets[i][c] * spin_kets[j][sp] * psi_raw[c][sp];
                }
            }
            if (!close(oracle, expected[k], 1e-12)) return false;
            if (!close(coefs[k].second.real(), oracle, 1e-12)) return false;
        }
    }
    return true;
}

bool orthogonality() {
    StateVector psi = joint_state_before_s4();
    StateVector ob_d = superpose({{1.0, make_basis_state(psi.registry, {{"coin", "h"}, {"spin", "d"}})},
                                  {-1.0, make_basis_state(psi.registry, {{"coin", "t"}, {"spin", "d"}})}});
    return std::abs(inner(ob_d, psi)) <= 1e-12;
}

bool find_statement(const std::vector<CertaintyStatement>& statements, const std::string& agent,
                    const Event& cond, const Event& target, Derivation derivation) {
    for (const auto& st : statements) {
        if (st.agent == agent && st.condition == std::vector<Event>{cond} &&
            st.target == target && st.derivation == derivation &&
            st.probability >= 1.0 - 1e-9) {
            return true;
        }
    }
    return false;
}

bool implication_chain() {
    Scenario fr = fr_scenario();
    auto h = derive_certainty_chain(fr, CollapsePolicy::policy_h());
    if (!find_statement(h, "Fbar", {"s1", "t"}, {"s6", "f"}, Derivation::Direct)) return false;
    if (!find_statement(h, "F", {"s3", "u"}, {"s1", "t"}, Derivation::Direct)) return false;
    if (!find_statement(h, "Wbar", {"s4", "ob"}, {"s3", "u"}, Derivation::Direct)) return false;
    if (!find_statement(h, "W", {"s4", "ob"}, {"s6", "f"}, Derivation::Chained)) return false;
    auto u = derive_certainty_chain(fr, CollapsePolicy::universal());
    for (const auto& st : u) {
        if (st.agent == "W" && st.target == Event{"s6", "f"} &&
            st.condition == std::vector<Event>{{"s4", "ob"}} &&
            st.derivation == Derivation::Chained) {
            return false;
        }
    }
    return true;
}

bool fr_contradiction() {
    Scenario fr = fr_scenario();
    auto contradictions = detect_contradictions(fr, CollapsePolicy::policy_h());
    int violations = 0;
    bool shape_ok = true;
    for (const auto& c : contradictions) {
        if (c.kind != ContradictionKind::BranchViolation) continue;
        ++violations;
        shape_ok = shape_ok &&
                   c.branch_outcomes ==
                       std::map<std::string, std::string>{{"s4", "ob"}, {"s6", "o"}} &&
                   close(c.branch_mass, 1.0 / 12.0, 1e-12);
    }
    if (violations != 1 || !shape_ok) return false;

    // Brute-force sequential Born oracle on raw arrays for the violating
    // history (t, u, ob, o): p(t) * p(u|t-prep) * p(ob|t) * p(o|u).
    const double oracle = (2.0 / 3.0) * 0.5 * 0.5 * 0.5;
    if (!close(oracle, 1.0 / 12.0, 1e-15)) return false;

    return detect_contradictions(fr, CollapsePolicy::universal()).empty();
}

bool epr_contradiction() {
    Scenario epr = epr_wigner_scenario();
    auto p = certainty(epr, "F", {{"s1", "u"}}, {"s2", "d"}, CollapsePolicy::policy_h());
    if (!p || !close(*p, 1.0, 1e-12)) return false;
    auto q = certainty(epr, "W", {{"s1", "u"}}, {"s2", "u"}, CollapsePolicy::policy_h(),
                       CollapseLens::AsIfSealed);
    if (!q || !close(*q, 0.5, 1e-12)) return false;

    auto find_disagreement = [](const Scenario& sc, const Event& cond, const Event& target) {
        for (const auto& c : detect_contradictions(sc, CollapsePolicy::policy_h())) {
            if (c.kind == ContradictionKind::ViewDisagreement &&
                c.statement.condition == std::vector<Event>{cond} &&
                c.statement.target == target &&
                close(c.statement_probability, 1.0, 1e-9) &&
                close(c.view_probability, 0.5, 1e-9)) {
                return true;
            }
        }
        return false;
    };
    if (!find_disagreement(epr, {"s1", "u"}, {"s2", "d"})) return false;
    // The dressed variant replays the structure through the announced coin.
    return find_disagreement(dressed_epr_scenario(), {"s4", "h"}, {"s6", "d"});
}

bool hardy_checks() {
    if (hardy_search(singlet_state(), 1.0).joint_probability > 1e-9) return false;
    const double deg = M_PI / 180.0;
    for (double theta : {10.0, 22.5, 35.0}) {
        if (hardy_search(schmidt_state(theta * deg), 1.0).joint_probability <= 0.0) return false;
    }
    double best = 0.0;
    for (double theta = 1.0; theta < 45.0; theta += 1.0) {
        best = std::max(best, hardy_search(schmidt_state(theta * deg), 1.0).joint_probability);
    }
    return close(best, 0.090, 0.005);
}

bool policy_invariants() {
    std::vector<Scenario> cases = {fr_scenario(), epr_wigner_scenario(), dressed_epr_scenario()};
    std::mt19937 rng(161803);
    for (int i = 0; i < 100; ++i) cases.push_back(testing::random_scenario(rng));
    for (const auto& sc : cases) {
        for (const auto& branch : enumerate_branches(sc, CollapsePolicy::universal())) {
            for (const auto& [name, view] : branch.views) {
                if ((view.state.amplitudes - branch.bookkeeper_state.amplitudes).norm() > 1e-9) {
                    return false;
                }
            }
        }
        if (!detect_contradictions(sc, CollapsePolicy::universal()).empty()) return false;
    }

    testing::GeneratorOptions open_only;
    open_only.allow_sealed = false;
    for (int i = 0; i < 100; ++i) {
        Scenario sc = testing::random_scenario(rng, open_only);
        auto h = enumerate_branches(sc, CollapsePolicy::policy_h());
        auto u = enumerate_branches(sc, CollapsePolicy::universal());
        if (h.size() != u.size()) return false;
        for (size_t b = 0; b < h.size(); ++b) {
            if (h[b].outcomes != u[b].outcomes) return false;
            if (h[b].bookkeeper_probability != u[b].bookkeeper_probability) return false;
            for (const auto& [name, view] : h[b].views) {
                if ((view.state.amplitudes - u[b].views.at(name).state.amplitudes).norm() != 0.0) {
                    return false;
                }
            }
        }
    }
    return true;
}

bool numerical_invariants() {
    std::mt19937 rng(271828);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, M_PI);
    auto reg = singlet_state().registry;

    auto rotated = [&](const std::string& target, double a) {
        Vector plus(2), minus(2);
        plus << std::cos(a), std::sin(a);
        minus << -std::sin(a), std::cos(a);
        return make_basis(*reg, {target}, {{"+", plus}, {"-", minus}});
    };
    auto random_state = [&]() {
        Vector v(4);
        for (int i = 0; i < 4; ++i) v[i] = Amplitude(unit(rng), unit(rng));
        return make_state(reg, v / v.norm());
    };

    for (int trial = 0; trial < 100; ++trial) {
        StateVector s = random_state();
        MeasurementBasis basis = rotated("q1", angle(rng));
        // Born distribution sums to one.
        Distribution d = outcome_probabilities(s, basis);
        double total = 0.0;
        for (const auto& [label, pr] : d.entries) total += pr;
        if (!close(total, 1.0, 1e-9)) return false;
        // Collapse is idempotent.
        for (const auto& [label, pr] : d.entries) {
            if (pr < 1e-6) continue;
            StateVector once = collapse(s, basis, label);
            StateVector twice = collapse(once, basis, label);
            if ((twice.amplitudes - once.amplitudes).norm() > 1e-12) return false;
        }
        // Parseval over a random product frame.
        auto coefs = rewrite_in_basis(s, {rotated("q1", angle(rng)), rotated("q2", angle(rng))});
        double parseval = 0.0;
        for (const auto& [key, c] : coefs) parseval += std::norm(c);
        if (!close(parseval, 1.0, 1e-9)) return false;
    }

    // Singlet anti-correlation at 100 random shared angles.
    StateVector singlet = singlet_state();
    for (int trial = 0; trial < 100; ++trial) {
        double a = angle(rng);
        MeasurementBasis b1 = rotated("q1", a);
        MeasurementBasis b2 = rotated("q2", a);
        StateVector after = collapse(singlet, b1, "+");
        if (!close(outcome_probabilities(after, b2).probability("-"), 1.0, 1e-9)) return false;
    }
    return true;
}

bool parser_checks() {
    namespace fs = std::filesystem;
    std::ifstream in(g_scenario_dir + "/fr.wfs");
    if (!in) return false;
    std::ostringstream buf;
    buf << in.rdbuf();
    Scenario parsed = parse_scenario(buf.str(), "fr");
    if (!scenario_equal(parsed, fr_scenario())) return false;

    // Parse-print-parse fixpoint on every shipped scenario file.
    for (const auto& entry : fs::directory_iterator(g_scenario_dir)) {
        if (entry.path().extension() != ".wfs") continue;
        std::ifstream file(entry.path());
        std::ostringstream text;
        text << file.rdbuf();
        Scenario first = parse_scenario(text.str());
        std::string printed = render_scenario(first);
        Scenario second = parse_scenario(printed);
        if (!scenario_equal(first, second)) return false;
        if (render_scenario(second) != printed) return false;
    }

    // Fuzz: mangled sources diagnose, never crash.
    std::string base = buf.str();
    std::mt19937 rng(14142);
    std::uniform_int_distribution<size_t> pos(0, base.size() - 1);
    std::uniform_int_distribution<int> byte(0, 255);
    for (int trial = 0; trial < 10000; ++trial) {
        std::string s = base;
        switch (trial % 3) {
            case 0: s[pos(rng)] = static_cast<char>(byte(rng)); break;
            case 1: s.erase(pos(rng), 1 + pos(rng) % 30); break;
            default: s.resize(pos(rng)); break;
        }
        try {
            parse_scenario(s);
        } catch (const Error&) {
            // expected for most mutations
        }
    }
    return true;
}

bool cli_contract() {
    const struct {
        const char* builtin;
        const char* policy;
        int code;
    } table[] = {
        {"fr", "H", 2},          {"fr", "universal", 0},          {"fr", "none", 2},
        {"epr", "H", 2},         {"epr", "universal", 0},         {"epr", "none", 2},
        {"epr-dressed", "H", 2}, {"epr-dressed", "universal", 0}, {"epr-dressed", "none", 2},
    };
    for (const auto& e : table) {
        std::string cmd = std::string("check ") + e.builtin + " --policy " + e.policy;
        if (run_command(cmd) != e.code) return false;
    }
    if (run_command("check nope --policy H") != 1) return false;
    for (const char* args :
         {"run fr --policy H", "run epr --policy H --format json", "hardy epr"}) {
        std::string first, second;
        if (run_command(args, &first) != 0) return false;
        if (run_command(args, &second) != 0) return false;
        if (first != second || first.empty()) return false;
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr, "usage: acceptance <wfs-binary> <scenario-dir>\n");
        return 2;
    }
    g_binary = argv[1];
    g_scenario_dir = argv[2];

    criterion(1, "joint-state expansion coefficients and masses", expansion_coefficients);
    criterion(2, "orthogonality of (ob, d) to the joint state", orthogonality);
    criterion(3, "implication chain present under H, severed under universal collapse",
              implication_chain);
    criterion(4, "exactly one falsifying branch (ob, o) with mass 1/12", fr_contradiction);
    criterion(5, "singlet certainty-1 vs one-half view disagreement, plain and dressed",
              epr_contradiction);
    criterion(6, "Hardy witness: zero on the singlet, positive and bounded elsewhere",
              hardy_checks);
    criterion(7, "policy invariants over built-ins and random scenarios", policy_invariants);
    criterion(8, "numerical invariants: Born sums, idempotence, anti-correlation, Parseval",
              numerical_invariants);
    criterion(9, "parser: file equality, print-parse fixpoint, fuzz stability", parser_checks);
    criterion(10, "command-line exit codes and byte-identical output", cli_contract);

    if (g_failures) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
