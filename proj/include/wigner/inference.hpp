#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wigner/agents.hpp"

namespace wigner {

struct Event {
    std::string step;   // measure step id
    std::string label;  // outcome label

    bool operator==(const Event& other) const = default;
    auto operator<=>(const Event& other) const = default;
};

enum class Derivation { Direct, Chained };

struct CertaintyStatement {
    std::string agent;
    std::vector<Event> condition;
    Event target;
    double probability = 0.0;
    Derivation derivation = Derivation::Direct;
    std::vector<std::string> chain;  // human-readable links for chained statements
    // Every event the statement takes as settled: the condition plus each
    // intermediate link target. A branch falsifies the statement only when it
    // realizes all of these yet not the final target.
    std::vector<Event> asserted;
};

enum class ContradictionKind { BranchViolation, ViewDisagreement };

struct Contradiction {
    ContradictionKind kind;
    CertaintyStatement statement;
    // BranchViolation: the violating single-outcome family and its bookkeeper mass.
    std::map<std::string, std::string> branch_outcomes;
    double branch_mass = 0.0;
    // ViewDisagreement: the agent whose state assignment disagrees, and the pair.
    std::string view_agent;
    double statement_probability = 0.0;
    double view_probability = 0.0;
};

// How measurement steps are read when deciding whose view collapses and which
// outcomes an agent can condition on. AsDeclared follows the scenario's
// sealed/open tags and announcements; AsIfSealed treats every step as sealed
// and ignores announcements, giving the maximally-unitary state assignment an
// outside agent holds for other agents' measurements.
enum class CollapseLens { AsDeclared, AsIfSealed };

// Can `agent` condition on the outcome of `step` under the lens?
bool knows_outcome(const Scenario& scenario, const CollapsePolicy& policy,
                   const MeasureStep& step, const Agent& agent, CollapseLens lens);

// Born probability of `target` in the agent's policy view conditioned on the
// events of `condition` the agent can know (unknowable events are dropped;
// sealed outcomes are queried through lab-proxy projectors). Measurements the
// policy collapses for this agent but whose outcomes are unspecified decohere
// the view. Returns nullopt when the condition is vacuous in the view.
std::optional<double> certainty(const Scenario& scenario, const std::string& agent,
                                const std::vector<Event>& condition, const Event& target,
                                const CollapsePolicy& policy,
                                CollapseLens lens = CollapseLens::AsDeclared);

// All direct certainty statements over single-event conditions, closed under
// certainty-transfer: if A is certain of X->Y and the measurer of Y is certain
// of Y->Z, then A is certain of X->Z; announced results carry the announcer's
// statements about them over to the receivers.
std::vector<CertaintyStatement> derive_certainty_chain(const Scenario& scenario,
                                                       const CollapsePolicy& policy);

std::vector<Contradiction> detect_contradictions(const Scenario& scenario,
                                                 const CollapsePolicy& policy);

std::vector<Contradiction> detect_contradictions(const Scenario& scenario,
                                                 const CollapsePolicy& policy,
                                                 const std::vector<CertaintyStatement>& statements,
                                                 const std::vector<Branch>& branches);

}  // namespace wigner
