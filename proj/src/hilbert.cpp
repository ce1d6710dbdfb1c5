#include "wigner/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace wigner {

int Subsystem::label_index(const std::string& label) const {
    for (int i = 0; i < dimension(); ++i) {
        if (labels[i] == label) return i;
    }
    throw Error("unknown label '" + label + "' for subsystem '" + name + "'");
}

SpaceRegistry::SpaceRegistry(std::vector<Subsystem> subsystems)
    : subsystems_(std::move(subsystems)) {
    std::set<std::string> names;
    for (const auto& sub : subsystems_) {
        if (sub.labels.empty()) {
            throw Error("subsystem '" + sub.name + "' has no outcome labels");
        }
        std::set<std::string> labels(sub.labels.begin(), sub.labels.end());
        if (labels.size() != sub.labels.size()) {
            throw Error("duplicate outcome labels in subsystem '" + sub.name + "'");
        }
        if (!names.insert(sub.name).second) {
            throw Error("duplicate subsystem name '" + sub.name + "'");
        }
    }
    strides_.assign(subsystems_.size(), 1);
    for (int i = static_cast<int>(subsystems_.size()) - 1; i >= 0; --i) {
        strides_[i] = total_dim_;
        total_dim_ *= subsystems_[i].dimension();
    }
}

bool SpaceRegistry::has(const std::string& name) const {
    for (const auto& sub : subsystems_) {
        if (sub.name == name) return true;
    }
    return false;
}

int SpaceRegistry::index_of(const std::string& name) const {
    for (int i = 0; i < size(); ++i) {
        if (subsystems_[i].name == name) return i;
    }
    throw Error("unknown subsystem '" + name + "'");
}

const Subsystem& SpaceRegistry::subsystem(const std::string& name) const {
    return subsystems_[index_of(name)];
}

int SpaceRegistry::flat_index(const std::vector<int>& digits) const {
    int idx = 0;
    for (int i = 0; i < size(); ++i) idx += digits[i] * strides_[i];
    return idx;
}

std::vector<int> SpaceRegistry::digits_of(int flat) const {
    std::vector<int> digits(size());
    for (int i = 0; i < size(); ++i) {
        digits[i] = flat / strides_[i];
        flat %= strides_[i];
    }
    return digits;
}

bool SpaceRegistry::operator==(const SpaceRegistry& other) const {
    if (size() != other.size()) return false;
    for (int i = 0; i < size(); ++i) {
        if (subsystems_[i].name != other.subsystems_[i].name) return false;
        if (subsystems_[i].labels != other.subsystems_[i].labels) return false;
    }
    return true;
}

bool same_registry(const StateVector& a, const StateVector& b) {
    return a.registry == b.registry || *a.registry == *b.registry;
}

StateVector make_state(std::shared_ptr<const SpaceRegistry> registry, Vector amplitudes) {
    if (!registry) throw Error("null registry");
    if (amplitudes.size() != registry->total_dimension()) {
        throw Error("amplitude vector length does not match registry dimension");
    }
    if (!amplitudes.allFinite()) throw Error("non-finite amplitude");
    return StateVector{std::move(registry), std::move(amplitudes)};
}

StateVector make_basis_state(std::shared_ptr<const SpaceRegistry> registry,
                             const std::map<std::string, std::string>& labels) {
    if (!registry) throw Error("null registry");
    std::vector<int> digits(registry->size(), -1);
    for (const auto& [name, label] : labels) {
        if (!registry->has(name)) throw Error("unknown subsystem '" + name + "'");
        int i = registry->index_of(name);
        digits[i] = registry->subsystems()[i].label_index(label);
    }
    for (int i = 0; i < registry->size(); ++i) {
        if (digits[i] < 0) {
            throw Error("subsystem '" + registry->subsystems()[i].name + "' not assigned a label");
        }
    }
    Vector amps = Vector::Zero(registry->total_dimension());
    amps[registry->flat_index(digits)] = 1.0;
    return StateVector{std::move(registry), std::move(amps)};
}

StateVector superpose(const std::vector<std::pair<Amplitude, StateVector>>& terms) {
    if (terms.empty()) throw Error("superpose: no terms");
    const StateVector& first = terms.front().second;
    Vector amps = Vector::Zero(first.dimension());
    for (const auto& [coef, state] : terms) {
        if (!same_registry(state, first)) throw Error("superpose: mixed registries");
        amps += coef * state.amplitudes;
    }
    double n2 = amps.squaredNorm();
    if (n2 < kZeroTol * kZeroTol) throw Error("superpose: zero vector");
    amps /= std::sqrt(n2);
    return StateVector{first.registry, std::move(amps)};
}

StateVector tensor(const StateVector& a, const StateVector& b) {
    for (const auto& sub : b.registry->subsystems()) {
        if (a.registry->has(sub.name)) {
            throw Error("tensor: subsystem name clash '" + sub.name + "'");
        }
    }
    std::vector<Subsystem> subs = a.registry->subsystems();
    subs.insert(subs.end(), b.registry->subsystems().begin(), b.registry->subsystems().end());
    auto registry = std::make_shared<SpaceRegistry>(std::move(subs));
    Vector amps(registry->total_dimension());
    const int nb = b.dimension();
    for (int i = 0; i < a.dimension(); ++i) {
        for (int j = 0; j < nb; ++j) amps[i * nb + j] = a.amplitudes[i] * b.amplitudes[j];
    }
    return StateVector{std::move(registry), std::move(amps)};
}

Amplitude inner(const StateVector& a, const StateVector& b) {
    if (!same_registry(a, b)) throw Error("inner: registry mismatch");
    return a.amplitudes.dot(b.amplitudes);
}

StateVector normalize(const StateVector& v) {
    double n = v.amplitudes.norm();
    if (n < kZeroTol) throw Error("normalize: zero vector");
    return StateVector{v.registry, v.amplitudes / n};
}

}  // namespace wigner
