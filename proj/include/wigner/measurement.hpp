#pragma once

#include <string>
#include <vector>

#include "wigner/hilbert.hpp"

namespace wigner {

// Orthonormal labeled frame on an ordered subset of subsystems. Kets live in
// the target subspace with its own mixed-radix layout (target order).
struct MeasurementBasis {
    std::vector<std::string> targets;
    std::vector<std::pair<std::string, Vector>> vectors;

    int outcome_count() const { return static_cast<int>(vectors.size()); }
    int outcome_index(const std::string& label) const;
};

// Orthonormality and completeness checked against the given registry.
MeasurementBasis make_basis(const SpaceRegistry& registry,
                            std::vector<std::string> targets,
                            std::vector<std::pair<std::string, Vector>> vectors);

// Computational basis of a single subsystem: one outcome per label.
MeasurementBasis computational_basis(const SpaceRegistry& registry, const std::string& target);

// Joint basis on the concatenation of two disjoint targets, outcome labels
// joined with ','.
MeasurementBasis product_basis(const MeasurementBasis& a, const MeasurementBasis& b);

struct Distribution {
    // In basis outcome order.
    std::vector<std::pair<std::string, double>> entries;

    double probability(const std::string& label) const;
};

Distribution outcome_probabilities(const StateVector& state, const MeasurementBasis& basis);

// Projection onto the outcome vector extended by identity, renormalized.
// Outcomes with probability below kZeroTol are rejected as impossible branches.
StateVector collapse(const StateVector& state, const MeasurementBasis& basis,
                     const std::string& outcome);

// Unnormalized projection; zero vector allowed (mass below kZeroTol).
StateVector project(const StateVector& state, const MeasurementBasis& basis,
                    const std::string& outcome);

// Coefficients of the state in the product frame of bases covering all
// subsystems on disjoint targets. Keys are outcome-label tuples, one label
// per basis, in the order the bases are given.
std::vector<std::pair<std::vector<std::string>, Amplitude>> rewrite_in_basis(
    const StateVector& state, const std::vector<MeasurementBasis>& bases);

}  // namespace wigner
