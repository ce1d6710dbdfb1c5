#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <string>

#include "wigner/dsl.hpp"
#include "wigner/scenarios.hpp"

using namespace wigner;

namespace {

const char* kFrSource = R"(
# coin and spin, two sealed labs
system coin labels h t
system spin labels u d
lab Lbar contains coin
lab L contains spin
agent Fbar inside Lbar
agent F inside L
agent Wbar outside
agent W outside
init sqrt(1/3)*|h,d> + sqrt(2/3)*|t,d>
measure Fbar on coin basis computational
prepare spin controlled-by coin map h -> |d> ; t -> |u> + |d>
measure F on spin basis computational
measure Wbar on coin basis { ob = |h> - |t> ; fb = |h> + |t> } open
announce Wbar to all
measure W on spin basis { o = |d> - |u> ; f = |u> + |d> } open
)";

}  // namespace

TEST_CASE("the scenario text reproduces the built-in experiment exactly") {
    Scenario parsed = parse_scenario(kFrSource, "fr");
    CHECK(scenario_equal(parsed, fr_scenario()));
}

TEST_CASE("unicode outcome labels are canonicalized") {
    Scenario parsed = parse_scenario(
        "system p labels ↑ ↓\n"
        "agent A outside\n"
        "init |↑> + |↓>\n"
        "measure A on p basis computational open\n");
    CHECK(parsed.registry->subsystem("p").labels == std::vector<std::string>{"u", "d"});
    Scenario macron = parse_scenario(
        "system c labels h t\n"
        "agent A outside\n"
        "init |h>\n"
        "measure A on c basis { o̅ = |h> - |t> ; f̄ = |h> + |t> } open\n");
    CHECK(macron.measure_step("s1").basis.vectors[0].first == "ob");
    CHECK(macron.measure_step("s1").basis.vectors[1].first == "fb");
}

TEST_CASE("kets are normalized and coefficients take all three forms") {
    Scenario s = parse_scenario(
        "system q labels a b\n"
        "agent A outside\n"
        "init 0.5*|a> + sqrt(3/4)*|b>\n"
        "measure A on q basis { x = 3/5*|a> + 4/5*|b> ; y = 4/5*|a> - 3/5*|b> } open\n");
    CHECK(std::abs(s.initial_state.amplitudes[0] - 0.5) < 1e-12);
    CHECK(std::abs(s.initial_state.amplitudes[1] - std::sqrt(0.75)) < 1e-12);
    const auto& basis = s.measure_step("s1").basis;
    CHECK(std::abs(basis.vectors[0].second[1] - 0.8) < 1e-12);
}

TEST_CASE("default visibility follows the agent's location") {
    Scenario s = parse_scenario(
        "system q labels a b\n"
        "lab L contains q\n"
        "agent In inside L\n"
        "agent Out outside\n"
        "init |a>\n"
        "measure In on q basis computational\n"
        "measure Out on q basis computational\n");
    CHECK(s.measure_step("s1").visibility == Visibility::Sealed);
    CHECK(s.measure_step("s2").visibility == Visibility::Open);
}

TEST_CASE("diagnostics carry line and column") {
    try {
        parse_scenario("system q labels a b\nagent A outside\ninit |a>\nmeasure A on q basis !\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line == 4);
        CHECK(e.column >= 20);
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
}

TEST_CASE("semantic errors are reported, not crashed on") {
    // Non-orthogonal basis kets.
    CHECK_THROWS_AS(parse_scenario("system q labels a b\nagent A outside\ninit |a>\n"
                                   "measure A on q basis { x = |a> ; y = |a> + |b> } open\n"),
                    ParseError);
    // Sealed measurement by an outside agent.
    CHECK_THROWS_AS(parse_scenario("system q labels a b\nagent A outside\ninit |a>\n"
                                   "measure A on q basis computational sealed\n"),
                    ParseError);
    // Announcement without a prior measurement.
    CHECK_THROWS_AS(parse_scenario("system q labels a b\nagent A outside\ninit |a>\n"
                                   "announce A to all\n"),
                    ParseError);
    // Missing init.
    CHECK_THROWS_AS(parse_scenario("system q labels a b\nagent A outside\n"), ParseError);
    // Zero init vector.
    CHECK_THROWS_AS(parse_scenario("system q labels a b\nagent A outside\ninit |a> - |a>\n"),
                    ParseError);
}

TEST_CASE("parse-print-parse is a fixpoint") {
    for (const Scenario& original :
         {parse_scenario(kFrSource, "fr"), fr_scenario(), epr_wigner_scenario(),
          dressed_epr_scenario()}) {
        std::string text = render_scenario(original);
        Scenario reparsed = parse_scenario(text);
        CHECK(scenario_equal(reparsed, original));
        CHECK(render_scenario(reparsed) == text);
    }
}

TEST_CASE("fuzz: mangled sources produce diagnostics, never crashes") {
    std::mt19937 rng(424242);
    std::string base = kFrSource;
    std::uniform_int_distribution<size_t> pos(0, base.size() - 1);
    std::uniform_int_distribution<int> byte(0, 255);
    std::uniform_int_distribution<int> mode(0, 3);
    int parsed_ok = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        std::string s = base;
        switch (mode(rng)) {
            case 0:  // flip a byte
                s[pos(rng)] = static_cast<char>(byte(rng));
                break;
            case 1:  // delete a span
                s.erase(pos(rng) % s.size(), 1 + pos(rng) % 40);
                break;
            case 2:  // duplicate a span
                s.insert(pos(rng) % s.size(), s.substr(pos(rng) % s.size(), 1 + pos(rng) % 20));
                break;
            default:  // truncate
                s.resize(pos(rng));
                break;
        }
        try {
            parse_scenario(s);
            ++parsed_ok;
        } catch (const Error&) {
            // diagnostic raised; that's the contract
        }
    }
    // Many mutations stay valid (comments, whitespace); most must fail loudly.
    CHECK(parsed_ok < 10000);
}
