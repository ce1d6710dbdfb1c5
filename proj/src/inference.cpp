#include "wigner/inference.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace wigner {

namespace {

bool lens_collapses(const Scenario& scenario, const CollapsePolicy& policy,
                    const MeasureStep& step, const Agent& agent, CollapseLens lens) {
    if (lens == CollapseLens::AsDeclared) {
        return should_collapse(policy, step, agent, scenario.agent(step.measurer));
    }
    MeasureStep sealed = step;
    sealed.visibility = Visibility::Sealed;
    return should_collapse(policy, sealed, agent, scenario.agent(step.measurer));
}

}  // namespace

bool knows_outcome(const Scenario& scenario, const CollapsePolicy& policy,
                   const MeasureStep& step, const Agent& agent, CollapseLens lens) {
    if (agent.name == step.measurer) return true;
    if (lens == CollapseLens::AsDeclared && scenario.announced_to(step.id, agent.name)) {
        return true;
    }
    return lens_collapses(scenario, policy, step, agent, lens);
}

std::optional<double> certainty(const Scenario& scenario, const std::string& agent_name,
                                const std::vector<Event>& condition, const Event& target,
                                const CollapsePolicy& policy, CollapseLens lens) {
    const Agent& agent = scenario.agent(agent_name);
    const MeasureStep& target_step = scenario.measure_step(target.step);
    target_step.basis.outcome_index(target.label);

    std::map<std::string, std::string> cond_by_step;
    for (const auto& ev : condition) {
        const MeasureStep& s = scenario.measure_step(ev.step);
        s.basis.outcome_index(ev.label);
        if (!knows_outcome(scenario, policy, s, agent, lens)) continue;  // dropped
        cond_by_step[ev.step] = ev.label;
    }

    // Degenerate case: the target step is itself conditioned on.
    if (auto it = cond_by_step.find(target.step); it != cond_by_step.end()) {
        return it->second == target.label ? 1.0 : 0.0;
    }

    // Weighted components of the agent's view; tag -1 before the target step,
    // afterwards the index of the target-step outcome the component followed.
    struct Component {
        int tag;
        Vector amps;
    };
    std::vector<Component> components{{-1, scenario.initial_state.amplitudes}};

    auto project_all = [&](const MeasurementBasis& basis, const std::string& outcome) {
        for (auto& comp : components) {
            StateVector s{scenario.registry, comp.amps};
            comp.amps = project(s, basis, outcome).amplitudes;
        }
    };
    auto decohere_all = [&](const MeasurementBasis& basis, bool tag_outcomes) {
        std::vector<Component> next;
        for (auto& comp : components) {
            if (comp.amps.squaredNorm() < kZeroTol * kZeroTol) continue;
            StateVector s{scenario.registry, comp.amps};
            for (int k = 0; k < basis.outcome_count(); ++k) {
                Vector part = project(s, basis, basis.vectors[k].first).amplitudes;
                if (part.squaredNorm() < kZeroTol * kZeroTol) continue;
                next.push_back({tag_outcomes ? k : comp.tag, std::move(part)});
            }
        }
        components = std::move(next);
    };

    for (const auto& step : scenario.steps) {
        if (const auto* prep = std::get_if<PrepareStep>(&step)) {
            for (auto& comp : components) {
                comp.amps = apply_prepare(*scenario.registry, *prep, comp.amps);
            }
        } else if (const auto* m = std::get_if<MeasureStep>(&step)) {
            if (auto it = cond_by_step.find(m->id); it != cond_by_step.end()) {
                project_all(m->basis, it->second);
            } else if (m->id == target.step) {
                decohere_all(m->basis, true);
            } else if (lens_collapses(scenario, policy, *m, agent, lens)) {
                decohere_all(m->basis, false);
            }
        } else if (const auto* an = std::get_if<AnnounceStep>(&step)) {
            if (lens == CollapseLens::AsIfSealed) continue;
            if (agent_name == an->announcer) continue;
            if (!an->receivers.empty() &&
                std::find(an->receivers.begin(), an->receivers.end(), agent_name) ==
                    an->receivers.end()) {
                continue;
            }
            if (cond_by_step.count(an->of_step)) continue;  // already conditioned
            const MeasureStep& m = scenario.measure_step(an->of_step);
            decohere_all(m.basis, an->of_step == target.step);
        }
    }

    double total = 0.0;
    double hit = 0.0;
    int target_index = target_step.basis.outcome_index(target.label);
    for (const auto& comp : components) {
        double mass = comp.amps.squaredNorm();
        total += mass;
        if (comp.tag == target_index) hit += mass;
    }
    if (total < kZeroTol) return std::nullopt;  // vacuous condition
    return hit / total;
}

namespace {

std::string describe(const CertaintyStatement& s) {
    std::string out = s.agent + ": ";
    for (size_t i = 0; i < s.condition.size(); ++i) {
        if (i) out += ",";
        out += s.condition[i].step + "=" + s.condition[i].label;
    }
    out += " => " + s.target.step + "=" + s.target.label;
    return out;
}

struct StatementKey {
    std::string agent;
    std::vector<Event> condition;
    Event target;
    Derivation derivation;

    auto operator<=>(const StatementKey& other) const = default;
};

StatementKey key_of(const CertaintyStatement& s) {
    return {s.agent, s.condition, s.target, s.derivation};
}

}  // namespace

std::vector<CertaintyStatement> derive_certainty_chain(const Scenario& scenario,
                                                       const CollapsePolicy& policy) {
    const double certain = 1.0 - kTol;
    auto measures = scenario.measure_steps();

    std::vector<CertaintyStatement> statements;
    std::set<StatementKey> seen;
    auto add = [&](CertaintyStatement s) {
        if (seen.insert(key_of(s)).second) statements.push_back(std::move(s));
    };

    // Direct statements: single-event conditions the agent can know.
    for (const auto& agent : scenario.agents) {
        for (const auto* sc : measures) {
            if (!knows_outcome(scenario, policy, *sc, agent, CollapseLens::AsDeclared)) continue;
            for (const auto& [oc, ket_c] : sc->basis.vectors) {
                for (const auto* st : measures) {
                    if (st->id == sc->id) continue;
                    for (const auto& [ot, ket_t] : st->basis.vectors) {
                        Event cond{sc->id, oc};
                        Event target{st->id, ot};
                        auto p = certainty(scenario, agent.name, {cond}, target, policy);
                        if (p && *p >= certain) {
                            add({agent.name, {cond}, target, *p, Derivation::Direct, {}, {cond}});
                        }
                    }
                }
            }
        }
    }

    // Close under certainty transfer (chaining) and announcements.
    bool changed = true;
    while (changed) {
        changed = false;
        size_t n = statements.size();
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = 0; j < n; ++j) {
                const CertaintyStatement& first = statements[i];
                const CertaintyStatement& second = statements[j];
                if (second.derivation != Derivation::Direct) continue;
                if (first.condition.size() != 1 || second.condition.size() != 1) continue;
                if (second.condition[0] != first.target) continue;
                // The second link must be held by the measurer of the shared event.
                if (scenario.measure_step(first.target.step).measurer != second.agent) continue;
                if (second.target.step == first.condition[0].step) continue;
                if (second.target == first.condition[0]) continue;
                CertaintyStatement chained{first.agent,
                                           first.condition,
                                           second.target,
                                           std::min(1.0, first.probability * second.probability),
                                           Derivation::Chained,
                                           first.chain,
                                           first.asserted};
                chained.asserted.push_back(first.target);
                chained.chain.push_back(describe(first));
                chained.chain.push_back(describe(second));
                if (seen.insert(key_of(chained)).second) {
                    statements.push_back(std::move(chained));
                    changed = true;
                }
            }
        }
        for (const auto& step : scenario.steps) {
            const auto* an = std::get_if<AnnounceStep>(&step);
            if (!an) continue;
            size_t m = statements.size();
            for (size_t i = 0; i < m; ++i) {
                const CertaintyStatement src = statements[i];
                if (src.agent != an->announcer) continue;
                if (src.condition.size() != 1 || src.condition[0].step != an->of_step) continue;
                for (const auto& agent : scenario.agents) {
                    if (agent.name == an->announcer) continue;
                    if (!an->receivers.empty() &&
                        std::find(an->receivers.begin(), an->receivers.end(), agent.name) ==
                            an->receivers.end()) {
                        continue;
                    }
                    CertaintyStatement carried{agent.name,         src.condition,
                                               src.target,         src.probability,
                                               Derivation::Chained, src.chain,
                                               src.asserted};
                    carried.chain.push_back("announced: " + describe(src));
                    if (seen.insert(key_of(carried)).second) {
                        statements.push_back(std::move(carried));
                        changed = true;
                    }
                }
            }
        }
    }

    std::sort(statements.begin(), statements.end(), [&](const auto& a, const auto& b) {
        auto pos = [&](const Event& e) { return scenario.step_position(e.step); };
        auto ka = std::tuple(pos(a.condition[0]), a.condition[0].label, pos(a.target),
                             a.target.label, a.agent, a.derivation == Derivation::Chained);
        auto kb = std::tuple(pos(b.condition[0]), b.condition[0].label, pos(b.target),
                             b.target.label, b.agent, b.derivation == Derivation::Chained);
        return ka < kb;
    });
    return statements;
}

std::vector<Contradiction> detect_contradictions(const Scenario& scenario,
                                                 const CollapsePolicy& policy) {
    return detect_contradictions(scenario, policy, derive_certainty_chain(scenario, policy),
                                 enumerate_branches(scenario, policy));
}

std::vector<Contradiction> detect_contradictions(const Scenario& scenario,
                                                 const CollapsePolicy& policy,
                                                 const std::vector<CertaintyStatement>& statements,
                                                 const std::vector<Branch>& branches) {
    const double certain = 1.0 - kTol;
    std::vector<Contradiction> out;

    for (const auto& stmt : statements) {
        if (stmt.probability < certain) continue;

        // Branch violations: a chained prediction about the agent's own future
        // measurement, conditioned on an outcome she actually learns, falsified
        // by a nonzero-mass single-outcome family.
        const MeasureStep& target_step = scenario.measure_step(stmt.target.step);
        bool own_future = stmt.derivation == Derivation::Chained &&
                          target_step.measurer == stmt.agent &&
                          stmt.condition.size() == 1 &&
                          scenario.step_position(stmt.target.step) >
                              scenario.step_position(stmt.condition[0].step);
        if (own_future) {
            for (const auto& [label, ket] : target_step.basis.vectors) {
                if (label == stmt.target.label) continue;
                // A branch falsifies the statement only when every event the
                // chain takes as settled actually happened in it.
                double mass = 0.0;
                for (const auto& branch : branches) {
                    bool consistent = true;
                    for (const auto& ev : stmt.asserted) {
                        if (branch.outcomes.at(ev.step) != ev.label) {
                            consistent = false;
                            break;
                        }
                    }
                    if (consistent && branch.outcomes.at(stmt.target.step) == label) {
                        mass += branch.bookkeeper_probability;
                    }
                }
                if (mass >= kZeroTol) {
                    Contradiction c;
                    c.kind = ContradictionKind::BranchViolation;
                    c.statement = stmt;
                    c.branch_outcomes = {{stmt.condition[0].step, stmt.condition[0].label},
                                         {stmt.target.step, label}};
                    c.branch_mass = mass;
                    out.push_back(std::move(c));
                }
            }
        }

        // View disagreements: some agent's maximally-unitary state assignment
        // gives the same conditioned event a different probability.
        for (const auto& agent : scenario.agents) {
            auto q = certainty(scenario, agent.name, stmt.condition, stmt.target, policy,
                               CollapseLens::AsIfSealed);
            if (!q) continue;
            if (std::abs(stmt.probability - *q) <= kTol) continue;
            if (stmt.probability < certain && *q < certain) continue;
            Contradiction c;
            c.kind = ContradictionKind::ViewDisagreement;
            c.statement = stmt;
            c.view_agent = agent.name;
            c.statement_probability = stmt.probability;
            c.view_probability = *q;
            out.push_back(std::move(c));
        }
    }

    std::sort(out.begin(), out.end(), [&](const Contradiction& a, const Contradiction& b) {
        auto pos = [&](const Event& e) { return scenario.step_position(e.step); };
        auto key = [&](const Contradiction& c) {
            return std::tuple(pos(c.statement.condition[0]), c.statement.condition[0].label,
                              pos(c.statement.target), c.statement.target.label,
                              c.kind == ContradictionKind::ViewDisagreement, c.statement.agent,
                              c.view_agent,
                              c.branch_outcomes.empty() ? "" : c.branch_outcomes.rbegin()->second);
        };
        return key(a) < key(b);
    });
    return out;
}

}  // namespace wigner
