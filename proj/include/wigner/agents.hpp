#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wigner/scenario.hpp"

namespace wigner {

enum class PolicyKind {
    PolicyH,           // sealed steps collapse inside views only; open steps collapse all
    UniversalCollapse, // every step collapses every view
    NoCollapse,        // no step collapses any view; outcomes are recorded only
    CustomTable,
};

struct CollapsePolicy {
    PolicyKind kind = PolicyKind::PolicyH;
    // (step id, agent name) -> collapse?, required for CustomTable.
    std::map<std::pair<std::string, std::string>, bool> table;

    static CollapsePolicy policy_h() { return {PolicyKind::PolicyH, {}}; }
    static CollapsePolicy universal() { return {PolicyKind::UniversalCollapse, {}}; }
    static CollapsePolicy none() { return {PolicyKind::NoCollapse, {}}; }
};

// Does `step` collapse `agent`'s state assignment? `measurer` is the agent
// performing the step.
bool should_collapse(const CollapsePolicy& policy, const MeasureStep& step,
                     const Agent& agent, const Agent& measurer);

struct AgentView {
    std::string agent;
    StateVector state;
    std::vector<std::pair<std::string, std::string>> known_events;  // (step id, outcome)
};

// One single-outcome history. Bookkeeper fields follow sequential universal
// collapse and are policy-independent; views are the per-policy overlays.
struct Branch {
    std::map<std::string, std::string> outcomes;  // measure step id -> outcome label
    double bookkeeper_probability = 1.0;
    StateVector bookkeeper_state;
    std::map<std::string, AgentView> views;
};

Branch initial_branch(const Scenario& scenario);

// Applies one step to a branch. Measurement steps require the outcome and
// reject outcomes impossible in the bookkeeper state.
Branch advance(const Scenario& scenario, const Branch& branch, const Step& step,
               const std::optional<std::string>& outcome, const CollapsePolicy& policy);

// One branch per outcome tuple with nonzero bookkeeper probability,
// deterministically ordered by outcome tuple in basis order.
std::vector<Branch> enumerate_branches(const Scenario& scenario, const CollapsePolicy& policy);

// Controlled re-preparation of a raw amplitude vector; shared with the
// inference engine's view evolution.
Vector apply_prepare(const SpaceRegistry& registry, const PrepareStep& step, const Vector& amps);

}  // namespace wigner
