#include "wigner/agents.hpp"

#include <algorithm>
#include <cmath>

namespace wigner {

bool should_collapse(const CollapsePolicy& policy, const MeasureStep& step,
                     const Agent& agent, const Agent& measurer) {
    switch (policy.kind) {
        case PolicyKind::UniversalCollapse:
            return true;
        case PolicyKind::NoCollapse:
            return false;
        case PolicyKind::PolicyH:
            if (step.visibility == Visibility::Open) return true;
            // Sealed: the measurer and everyone inside her lab.
            if (agent.name == measurer.name) return true;
            return measurer.lab && agent.lab && *agent.lab == *measurer.lab;
        case PolicyKind::CustomTable: {
            auto it = policy.table.find({step.id, agent.name});
            if (it == policy.table.end()) {
                throw Error("collapse table has no entry for step '" + step.id + "', agent '" +
                            agent.name + "'");
            }
            return it->second;
        }
    }
    throw Error("unreachable");
}

Vector apply_prepare(const SpaceRegistry& registry, const PrepareStep& step, const Vector& amps) {
    const int control_pos = registry.index_of(step.control);
    const int target_pos = registry.index_of(step.target);
    const Subsystem& control = registry.subsystems()[control_pos];
    const Subsystem& target = registry.subsystems()[target_pos];

    // Mass per (control label, target label); the target must sit in a single
    // basis label within each populated control sector.
    std::vector<std::vector<double>> mass(control.dimension(),
                                          std::vector<double>(target.dimension(), 0.0));
    for (int idx = 0; idx < amps.size(); ++idx) {
        auto digits = registry.digits_of(idx);
        mass[digits[control_pos]][digits[target_pos]] += std::norm(amps[idx]);
    }

    std::vector<int> fiducial(control.dimension(), -1);
    for (int c = 0; c < control.dimension(); ++c) {
        for (int t = 0; t < target.dimension(); ++t) {
            if (mass[c][t] < kZeroTol) continue;
            if (fiducial[c] >= 0) {
                throw Error("prepare step '" + step.id + "': target '" + step.target +
                            "' is not in a basis state in control sector '" + control.labels[c] +
                            "'");
            }
            fiducial[c] = t;
        }
    }

    std::vector<const Vector*> kets(control.dimension(), nullptr);
    for (const auto& [label, ket] : step.map) kets[control.label_index(label)] = &ket;
    for (int c = 0; c < control.dimension(); ++c) {
        if (fiducial[c] >= 0 && !kets[c]) {
            throw Error("prepare step '" + step.id + "': no mapping for control label '" +
                        control.labels[c] + "'");
        }
    }

    Vector out = Vector::Zero(amps.size());
    for (int idx = 0; idx < amps.size(); ++idx) {
        auto digits = registry.digits_of(idx);
        int c = digits[control_pos];
        if (fiducial[c] < 0 || digits[target_pos] != fiducial[c]) continue;
        for (int t = 0; t < target.dimension(); ++t) {
            auto d2 = digits;
            d2[target_pos] = t;
            out[registry.flat_index(d2)] += (*kets[c])[t] * amps[idx];
        }
    }
    return out;
}

Branch initial_branch(const Scenario& scenario) {
    Branch branch;
    branch.bookkeeper_state = scenario.initial_state;
    for (const auto& agent : scenario.agents) {
        branch.views[agent.name] = AgentView{agent.name, scenario.initial_state, {}};
    }
    return branch;
}

namespace {

void collapse_view(AgentView& view, const MeasurementBasis& basis, const std::string& outcome,
                   const StateVector& bookkeeper) {
    StateVector projected = project(view.state, basis, outcome);
    double p = projected.squared_norm();
    if (p < kZeroTol) {
        // The view deemed this outcome impossible; confronted with the record,
        // the agent adopts the bookkeeper's post-collapse state.
        view.state = bookkeeper;
    } else {
        projected.amplitudes /= std::sqrt(p);
        view.state = std::move(projected);
    }
}

}  // namespace

Branch advance(const Scenario& scenario, const Branch& branch, const Step& step,
               const std::optional<std::string>& outcome, const CollapsePolicy& policy) {
    Branch next = branch;

    if (const auto* prep = std::get_if<PrepareStep>(&step)) {
        next.bookkeeper_state.amplitudes =
            apply_prepare(*scenario.registry, *prep, branch.bookkeeper_state.amplitudes);
        for (auto& [name, view] : next.views) {
            view.state.amplitudes = apply_prepare(*scenario.registry, *prep, view.state.amplitudes);
            double n = view.state.amplitudes.norm();
            if (n < kZeroTol) throw Error("prepare step '" + prep->id + "' annihilated a view");
            view.state.amplitudes /= n;
        }
        double n = next.bookkeeper_state.amplitudes.norm();
        if (n < kZeroTol) throw Error("prepare step '" + prep->id + "' annihilated the state");
        next.bookkeeper_state.amplitudes /= n;
        return next;
    }

    if (const auto* m = std::get_if<MeasureStep>(&step)) {
        if (!outcome) throw Error("measure step '" + m->id + "' requires an outcome");
        double p = outcome_probabilities(branch.bookkeeper_state, m->basis).probability(*outcome);
        if (p < kZeroTol) {
            throw Error("impossible branch: outcome '" + *outcome + "' at step '" + m->id + "'");
        }
        next.bookkeeper_state = collapse(branch.bookkeeper_state, m->basis, *outcome);
        next.bookkeeper_probability *= p;
        next.outcomes[m->id] = *outcome;

        const Agent& measurer = scenario.agent(m->measurer);
        for (auto& [name, view] : next.views) {
            const Agent& agent = scenario.agent(name);
            bool collapses = should_collapse(policy, *m, agent, measurer);
            if (collapses) {
                collapse_view(view, m->basis, *outcome, next.bookkeeper_state);
            }
            if (collapses || name == measurer.name) {
                view.known_events.emplace_back(m->id, *outcome);
            }
        }
        return next;
    }

    const auto& an = std::get<AnnounceStep>(step);
    auto it = branch.outcomes.find(an.of_step);
    if (it == branch.outcomes.end()) {
        throw Error("announce step '" + an.id + "': step '" + an.of_step + "' has no outcome yet");
    }
    const MeasureStep& m = scenario.measure_step(an.of_step);
    for (auto& [name, view] : next.views) {
        if (name == an.announcer) continue;
        if (!an.receivers.empty() &&
            std::find(an.receivers.begin(), an.receivers.end(), name) == an.receivers.end()) {
            continue;
        }
        // Receivers who already hold this record (e.g. they collapsed when the
        // measurement happened) are not re-projected onto the old outcome.
        if (std::find(view.known_events.begin(), view.known_events.end(),
                      std::make_pair(an.of_step, it->second)) != view.known_events.end()) {
            continue;
        }
        collapse_view(view, m.basis, it->second, next.bookkeeper_state);
        view.known_events.emplace_back(an.of_step, it->second);
    }
    return next;
}

std::vector<Branch> enumerate_branches(const Scenario& scenario, const CollapsePolicy& policy) {
    std::vector<Branch> frontier{initial_branch(scenario)};
    for (const auto& step : scenario.steps) {
        std::vector<Branch> next;
        for (const auto& branch : frontier) {
            if (const auto* m = std::get_if<MeasureStep>(&step)) {
                Distribution dist = outcome_probabilities(branch.bookkeeper_state, m->basis);
                for (const auto& [label, p] : dist.entries) {
                    if (p < kZeroTol) continue;
                    next.push_back(advance(scenario, branch, step, label, policy));
                }
            } else {
                next.push_back(advance(scenario, branch, step, std::nullopt, policy));
            }
        }
        frontier = std::move(next);
    }
    return frontier;
}

}  // namespace wigner
