#pragma once

#include <array>

#include "wigner/scenario.hpp"

namespace wigner {

// The four-agent, two-lab coin/spin experiment. Coin weights sqrt(1/3) and
// sqrt(2/3); conditional spin preparation h -> |d>, t -> (|u>+|d>)/sqrt(2);
// sealed coin and spin measurements, open ob/fb and o/f measurements, with
// the ob/fb result announced.
Scenario fr_scenario();

// Singlet pair: F's sealed z-measurement on one particle, W's open
// z-measurement on the other.
Scenario epr_wigner_scenario();

// The EPR setting dressed up with two labs, four observers and an announced
// coin measurement; F's z-measurement is superfluous by construction.
Scenario dressed_epr_scenario();

// Planar (real-rotation) measurement settings for the Hardy check, one angle
// per basis, in radians. Outcome "+" is the direction cos|0> + sin|1>.
struct HardySettings {
    double a1 = 0.0;
    double a2 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
};

struct HardyResult {
    HardySettings settings;
    double joint_probability = 0.0;              // P(A1=+, B1=+)
    std::array<double, 3> constraint_residuals{};  // P(A1+,B2-), P(A2-,B1+), P(A2+,B2+)

    bool witness() const {
        return joint_probability > kTol && constraint_residuals[0] <= kTol &&
               constraint_residuals[1] <= kTol && constraint_residuals[2] <= kTol;
    }
};

// Single-qubit planar basis at `angle`, outcomes "+" and "-".
MeasurementBasis planar_basis(const SpaceRegistry& registry, const std::string& target,
                              double angle);

// Born-rule evaluation of the Hardy quantities for a two-qubit state.
HardyResult hardy_probability(const StateVector& state, const HardySettings& settings);

// Deterministic search for the settings maximizing the joint probability
// subject to all residuals <= 1e-6. One side-2 angle runs over the grid; the
// other three angles are solved in closed form to zero the residuals.
HardyResult hardy_search(const StateVector& state, double grid_step_degrees);

// Convenience states on a fresh two-qubit registry (subsystems q1, q2 with
// labels u, d).
StateVector singlet_state();
StateVector schmidt_state(double theta);  // cos(theta)|uu> + sin(theta)|dd>

}  // namespace wigner
