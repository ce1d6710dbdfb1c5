#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "wigner/inference.hpp"

namespace wigner {

// Everything a single simulation run produces, in deterministic order.
struct RunReport {
    std::string scenario;
    std::string policy;
    std::vector<Branch> branches;
    std::vector<CertaintyStatement> statements;
    std::vector<Contradiction> contradictions;
};

std::string policy_name(const CollapsePolicy& policy);

RunReport build_report(const Scenario& scenario, const CollapsePolicy& policy);

// "p/q" when `x` is within 1e-9 of a rational with denominator <= 144,
// empty otherwise.
std::string as_rational(double x);

// 12-significant-digit decimal, annotated with the rational form when one
// exists: "0.0833333333333 (1/12)".
std::string format_probability(double x);

std::string render_text(const Scenario& scenario, const RunReport& report);

nlohmann::ordered_json to_json(const Scenario& scenario, const RunReport& report);

}  // namespace wigner
