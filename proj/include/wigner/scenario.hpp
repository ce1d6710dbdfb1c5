#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wigner/hilbert.hpp"
#include "wigner/measurement.hpp"

namespace wigner {

struct Agent {
    std::string name;
    std::optional<std::string> lab;  // empty = outside every lab

    bool inside(const std::string& lab_name) const { return lab && *lab == lab_name; }
};

struct Lab {
    std::string name;
    std::vector<std::string> subsystems;
};

enum class Visibility { Sealed, Open };

struct MeasureStep {
    std::string id;
    std::string measurer;
    MeasurementBasis basis;
    Visibility visibility = Visibility::Open;
};

// Controlled preparation: for each control label the target subsystem is
// re-prepared from its current basis label into the mapped ket. Applied to
// every agent's view alike.
struct PrepareStep {
    std::string id;
    std::string target;
    std::string control;
    std::vector<std::pair<std::string, Vector>> map;  // control label -> target ket
};

struct AnnounceStep {
    std::string id;
    std::string announcer;
    std::string of_step;  // an earlier measure step by the announcer
    std::vector<std::string> receivers;  // empty = all agents
};

using Step = std::variant<PrepareStep, MeasureStep, AnnounceStep>;

struct Scenario {
    std::string name;
    std::shared_ptr<const SpaceRegistry> registry;
    std::vector<Agent> agents;
    std::vector<Lab> labs;
    StateVector initial_state;
    std::vector<Step> steps;

    const Agent& agent(const std::string& name) const;
    const Lab* lab(const std::string& name) const;
    const MeasureStep& measure_step(const std::string& id) const;
    int step_position(const std::string& id) const;
    std::vector<const MeasureStep*> measure_steps() const;
    bool announced_to(const std::string& step_id, const std::string& agent_name) const;

    // Checks all structural invariants; throws Error on violation.
    void validate() const;
};

const std::string& step_id(const Step& step);

}  // namespace wigner
