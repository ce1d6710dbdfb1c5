#include "wigner/scenario.hpp"

#include <algorithm>
#include <set>

namespace wigner {

const std::string& step_id(const Step& step) {
    return std::visit([](const auto& s) -> const std::string& { return s.id; }, step);
}

const Agent& Scenario::agent(const std::string& name) const {
    for (const auto& a : agents) {
        if (a.name == name) return a;
    }
    throw Error("unknown agent '" + name + "'");
}

const Lab* Scenario::lab(const std::string& name) const {
    for (const auto& l : labs) {
        if (l.name == name) return &l;
    }
    return nullptr;
}

const MeasureStep& Scenario::measure_step(const std::string& id) const {
    for (const auto& step : steps) {
        if (const auto* m = std::get_if<MeasureStep>(&step)) {
            if (m->id == id) return *m;
        }
    }
    throw Error("unknown measure step '" + id + "'");
}

int Scenario::step_position(const std::string& id) const {
    for (size_t i = 0; i < steps.size(); ++i) {
        if (step_id(steps[i]) == id) return static_cast<int>(i);
    }
    throw Error("unknown step '" + id + "'");
}

std::vector<const MeasureStep*> Scenario::measure_steps() const {
    std::vector<const MeasureStep*> out;
    for (const auto& step : steps) {
        if (const auto* m = std::get_if<MeasureStep>(&step)) out.push_back(m);
    }
    return out;
}

bool Scenario::announced_to(const std::string& step_id_, const std::string& agent_name) const {
    for (const auto& step : steps) {
        const auto* an = std::get_if<AnnounceStep>(&step);
        if (!an || an->of_step != step_id_) continue;
        if (an->receivers.empty()) return true;  // broadcast
        if (std::find(an->receivers.begin(), an->receivers.end(), agent_name) !=
            an->receivers.end()) {
            return true;
        }
    }
    return false;
}

void Scenario::validate() const {
    if (!registry) throw Error("scenario has no registry");
    if (std::abs(initial_state.squared_norm() - 1.0) > kTol) {
        throw Error("initial state is not normalized");
    }
    std::set<std::string> agent_names;
    for (const auto& a : agents) {
        if (!agent_names.insert(a.name).second) throw Error("duplicate agent '" + a.name + "'");
        if (a.lab && !lab(*a.lab)) throw Error("agent '" + a.name + "' in unknown lab '" + *a.lab + "'");
    }
    std::set<std::string> lab_names;
    for (const auto& l : labs) {
        if (!lab_names.insert(l.name).second) throw Error("duplicate lab '" + l.name + "'");
        for (const auto& s : l.subsystems) {
            if (!registry->has(s)) throw Error("lab '" + l.name + "' lists unknown subsystem '" + s + "'");
        }
    }

    std::set<std::string> step_ids;
    std::set<std::string> measure_ids_seen;
    for (const auto& step : steps) {
        if (!step_ids.insert(step_id(step)).second) {
            throw Error("duplicate step id '" + step_id(step) + "'");
        }
        if (const auto* m = std::get_if<MeasureStep>(&step)) {
            const Agent& who = agent(m->measurer);
            for (const auto& t : m->basis.targets) {
                if (!registry->has(t)) {
                    throw Error("step '" + m->id + "' measures unknown subsystem '" + t + "'");
                }
            }
            if (m->visibility == Visibility::Sealed) {
                if (!who.lab) {
                    throw Error("sealed step '" + m->id + "' performed by outside agent '" +
                                m->measurer + "'");
                }
                const Lab* l = lab(*who.lab);
                for (const auto& t : m->basis.targets) {
                    if (std::find(l->subsystems.begin(), l->subsystems.end(), t) ==
                        l->subsystems.end()) {
                        throw Error("sealed step '" + m->id + "' measures '" + t +
                                    "' outside lab '" + l->name + "'");
                    }
                }
            }
            measure_ids_seen.insert(m->id);
        } else if (const auto* p = std::get_if<PrepareStep>(&step)) {
            const Subsystem& target = registry->subsystem(p->target);
            const Subsystem& control = registry->subsystem(p->control);
            if (p->target == p->control) throw Error("prepare step '" + p->id + "' targets its control");
            for (const auto& [label, ket] : p->map) {
                control.label_index(label);
                if (ket.size() != target.dimension()) {
                    throw Error("prepare step '" + p->id + "' ket has wrong dimension");
                }
                if (std::abs(ket.squaredNorm() - 1.0) > kTol) {
                    throw Error("prepare step '" + p->id + "' ket for '" + label +
                                "' is not normalized");
                }
            }
        } else if (const auto* an = std::get_if<AnnounceStep>(&step)) {
            agent(an->announcer);
            if (!measure_ids_seen.count(an->of_step)) {
                throw Error("announce step '" + an->id + "' references no earlier measure step");
            }
            if (measure_step(an->of_step).measurer != an->announcer) {
                throw Error("announce step '" + an->id + "' announces a result '" + an->announcer +
                            "' did not obtain");
            }
            for (const auto& r : an->receivers) agent(r);
        }
    }
}

}  // namespace wigner
