#include "wigner/measurement.hpp"

#include <cmath>
#include <set>

namespace wigner {

namespace {

// Index bookkeeping for a measurement on a subset of subsystems: every full
// flat index splits into a target part (mixed radix over the targets, in
// target order) and a rest part.
struct TargetSplit {
    std::vector<int> target_pos;  // registry positions of targets, target order
    int target_dim = 1;
    int rest_dim = 1;
    std::vector<int> target_of;  // per full index
    std::vector<int> rest_of;    // per full index

    TargetSplit(const SpaceRegistry& registry, const std::vector<std::string>& targets) {
        for (const auto& name : targets) target_pos.push_back(registry.index_of(name));
        std::set<int> in_target(target_pos.begin(), target_pos.end());
        if (in_target.size() != target_pos.size()) throw Error("repeated measurement target");
        for (int p : target_pos) target_dim *= registry.subsystems()[p].dimension();
        rest_dim = registry.total_dimension() / target_dim;

        target_of.resize(registry.total_dimension());
        rest_of.resize(registry.total_dimension());
        for (int idx = 0; idx < registry.total_dimension(); ++idx) {
            auto digits = registry.digits_of(idx);
            int t = 0;
            for (int p : target_pos) t = t * registry.subsystems()[p].dimension() + digits[p];
            int r = 0;
            for (int i = 0; i < registry.size(); ++i) {
                if (!in_target.count(i)) r = r * registry.subsystems()[i].dimension() + digits[i];
            }
            target_of[idx] = t;
            rest_of[idx] = r;
        }
    }
};

}  // namespace

int MeasurementBasis::outcome_index(const std::string& label) const {
    for (int i = 0; i < outcome_count(); ++i) {
        if (vectors[i].first == label) return i;
    }
    throw Error("unknown outcome label '" + label + "'");
}

MeasurementBasis make_basis(const SpaceRegistry& registry,
                            std::vector<std::string> targets,
                            std::vector<std::pair<std::string, Vector>> vectors) {
    int dim = 1;
    for (const auto& name : targets) dim *= registry.subsystem(name).dimension();
    if (static_cast<int>(vectors.size()) != dim) {
        throw Error("basis must have exactly " + std::to_string(dim) + " vectors");
    }
    std::set<std::string> labels;
    for (auto& [label, ket] : vectors) {
        if (!labels.insert(label).second) throw Error("duplicate outcome label '" + label + "'");
        if (ket.size() != dim) throw Error("basis ket has wrong dimension");
    }
    for (size_t i = 0; i < vectors.size(); ++i) {
        for (size_t j = 0; j <= i; ++j) {
            Amplitude g = vectors[i].second.dot(vectors[j].second);
            double want = (i == j) ? 1.0 : 0.0;
            if (std::abs(g - want) > kTol) {
                throw Error("basis vectors '" + vectors[i].first + "'/'" + vectors[j].first +
                            "' are not orthonormal");
            }
        }
    }
    return MeasurementBasis{std::move(targets), std::move(vectors)};
}

MeasurementBasis computational_basis(const SpaceRegistry& registry, const std::string& target) {
    const Subsystem& sub = registry.subsystem(target);
    std::vector<std::pair<std::string, Vector>> vectors;
    for (int i = 0; i < sub.dimension(); ++i) {
        Vector ket = Vector::Zero(sub.dimension());
        ket[i] = 1.0;
        vectors.emplace_back(sub.labels[i], std::move(ket));
    }
    return MeasurementBasis{{target}, std::move(vectors)};
}

MeasurementBasis product_basis(const MeasurementBasis& a, const MeasurementBasis& b) {
    std::vector<std::string> targets = a.targets;
    targets.insert(targets.end(), b.targets.begin(), b.targets.end());
    std::vector<std::pair<std::string, Vector>> vectors;
    for (const auto& [la, ka] : a.vectors) {
        for (const auto& [lb, kb] : b.vectors) {
            Vector ket(ka.size() * kb.size());
            for (int i = 0; i < ka.size(); ++i) {
                for (int j = 0; j < kb.size(); ++j) ket[i * kb.size() + j] = ka[i] * kb[j];
            }
            vectors.emplace_back(la + "," + lb, std::move(ket));
        }
    }
    return MeasurementBasis{std::move(targets), std::move(vectors)};
}

double Distribution::probability(const std::string& label) const {
    for (const auto& [l, p] : entries) {
        if (l == label) return p;
    }
    throw Error("unknown outcome label '" + label + "'");
}

Distribution outcome_probabilities(const StateVector& state, const MeasurementBasis& basis) {
    TargetSplit split(*state.registry, basis.targets);
    Distribution dist;
    for (const auto& [label, ket] : basis.vectors) {
        Vector c = Vector::Zero(split.rest_dim);
        for (int idx = 0; idx < state.dimension(); ++idx) {
            c[split.rest_of[idx]] += std::conj(ket[split.target_of[idx]]) * state.amplitudes[idx];
        }
        dist.entries.emplace_back(label, c.squaredNorm());
    }
    return dist;
}

StateVector project(const StateVector& state, const MeasurementBasis& basis,
                    const std::string& outcome) {
    TargetSplit split(*state.registry, basis.targets);
    const Vector& ket = basis.vectors[basis.outcome_index(outcome)].second;
    Vector c = Vector::Zero(split.rest_dim);
    for (int idx = 0; idx < state.dimension(); ++idx) {
        c[split.rest_of[idx]] += std::conj(ket[split.target_of[idx]]) * state.amplitudes[idx];
    }
    Vector out(state.dimension());
    for (int idx = 0; idx < state.dimension(); ++idx) {
        out[idx] = ket[split.target_of[idx]] * c[split.rest_of[idx]];
    }
    return StateVector{state.registry, std::move(out)};
}

StateVector collapse(const StateVector& state, const MeasurementBasis& basis,
                     const std::string& outcome) {
    StateVector projected = project(state, basis, outcome);
    double p = projected.squared_norm();
    if (p < kZeroTol) {
        throw Error("impossible branch: outcome '" + outcome + "' has zero probability");
    }
    projected.amplitudes /= std::sqrt(p);
    return projected;
}

std::vector<std::pair<std::vector<std::string>, Amplitude>> rewrite_in_basis(
    const StateVector& state, const std::vector<MeasurementBasis>& bases) {
    const SpaceRegistry& registry = *state.registry;
    std::set<std::string> covered;
    for (const auto& basis : bases) {
        for (const auto& name : basis.targets) {
            if (!covered.insert(name).second) {
                throw Error("rewrite_in_basis: subsystem '" + name + "' covered twice");
            }
        }
    }
    for (const auto& sub : registry.subsystems()) {
        if (!covered.count(sub.name)) {
            throw Error("rewrite_in_basis: subsystem '" + sub.name + "' not covered");
        }
    }

    std::vector<TargetSplit> splits;
    for (const auto& basis : bases) splits.emplace_back(registry, basis.targets);

    std::vector<std::pair<std::vector<std::string>, Amplitude>> out;
    std::vector<int> choice(bases.size(), 0);
    while (true) {
        // Frame vector = tensor of chosen kets; coefficient = <frame|state>.
        Amplitude coef = 0.0;
        for (int idx = 0; idx < state.dimension(); ++idx) {
            Amplitude f = 1.0;
            for (size_t b = 0; b < bases.size(); ++b) {
                f *= bases[b].vectors[choice[b]].second[splits[b].target_of[idx]];
            }
            coef += std::conj(f) * state.amplitudes[idx];
        }
        std::vector<std::string> key;
        for (size_t b = 0; b < bases.size(); ++b) key.push_back(bases[b].vectors[choice[b]].first);
        out.emplace_back(std::move(key), coef);

        int b = static_cast<int>(bases.size()) - 1;
        while (b >= 0) {
            if (++choice[b] < bases[b].outcome_count()) break;
            choice[b] = 0;
            --b;
        }
        if (b < 0) break;
    }
    return out;
}

}  // namespace wigner
