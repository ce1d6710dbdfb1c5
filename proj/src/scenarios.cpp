#include "wigner/scenarios.hpp"

#include <cmath>

namespace wigner {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Vector ket2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

std::shared_ptr<const SpaceRegistry> coin_spin_registry() {
    return std::make_shared<SpaceRegistry>(std::vector<Subsystem>{
        {"coin", {"h", "t"}},
        {"spin", {"u", "d"}},
    });
}

}  // namespace

Scenario fr_scenario() {
    Scenario s;
    s.name = "fr";
    s.registry = coin_spin_registry();
    s.labs = {{"Lbar", {"coin"}}, {"L", {"spin"}}};
    s.agents = {{"Fbar", "Lbar"}, {"F", "L"}, {"Wbar", std::nullopt}, {"W", std::nullopt}};

    Vector init = Vector::Zero(4);
    init[s.registry->flat_index({0, 1})] = std::sqrt(1.0 / 3.0);  // |h,d>
    init[s.registry->flat_index({1, 1})] = std::sqrt(2.0 / 3.0);  // |t,d>
    s.initial_state = make_state(s.registry, std::move(init));

    MeasurementBasis ob_fb = make_basis(*s.registry, {"coin"},
                                        {{"ob", ket2(kInvSqrt2, -kInvSqrt2)},
                                         {"fb", ket2(kInvSqrt2, kInvSqrt2)}});
    // Labels are (u, d); |o> = (|d> - |u>)/sqrt(2), |f> = (|d> + |u>)/sqrt(2).
    MeasurementBasis o_f = make_basis(*s.registry, {"spin"},
                                      {{"o", ket2(-kInvSqrt2, kInvSqrt2)},
                                       {"f", ket2(kInvSqrt2, kInvSqrt2)}});

    s.steps = {
        MeasureStep{"s1", "Fbar", computational_basis(*s.registry, "coin"), Visibility::Sealed},
        PrepareStep{"s2", "spin", "coin",
                    {{"h", ket2(0.0, 1.0)}, {"t", ket2(kInvSqrt2, kInvSqrt2)}}},
        MeasureStep{"s3", "F", computational_basis(*s.registry, "spin"), Visibility::Sealed},
        MeasureStep{"s4", "Wbar", ob_fb, Visibility::Open},
        AnnounceStep{"s5", "Wbar", "s4", {}},
        MeasureStep{"s6", "W", o_f, Visibility::Open},
    };
    s.validate();
    return s;
}

Scenario epr_wigner_scenario() {
    Scenario s;
    s.name = "epr";
    s.registry = std::make_shared<SpaceRegistry>(std::vector<Subsystem>{
        {"p1", {"u", "d"}},
        {"p2", {"u", "d"}},
    });
    s.labs = {{"L", {"p1"}}};
    s.agents = {{"F", "L"}, {"W", std::nullopt}};

    Vector init = Vector::Zero(4);
    init[s.registry->flat_index({0, 1})] = kInvSqrt2;   // |u,d>
    init[s.registry->flat_index({1, 0})] = -kInvSqrt2;  // |d,u>
    s.initial_state = make_state(s.registry, std::move(init));

    s.steps = {
        MeasureStep{"s1", "F", computational_basis(*s.registry, "p1"), Visibility::Sealed},
        MeasureStep{"s2", "W", computational_basis(*s.registry, "p2"), Visibility::Open},
    };
    s.validate();
    return s;
}

Scenario dressed_epr_scenario() {
    Scenario s;
    s.name = "epr-dressed";
    s.registry = coin_spin_registry();
    s.labs = {{"Lbar", {"coin"}}, {"L", {"spin"}}};
    s.agents = {{"Fbar", "Lbar"}, {"F", "L"}, {"Wbar", std::nullopt}, {"W", std::nullopt}};

    Vector init = Vector::Zero(4);
    init[s.registry->flat_index({0, 1})] = kInvSqrt2;  // |h,d>
    init[s.registry->flat_index({1, 1})] = kInvSqrt2;  // |t,d>
    s.initial_state = make_state(s.registry, std::move(init));

    s.steps = {
        MeasureStep{"s1", "Fbar", computational_basis(*s.registry, "coin"), Visibility::Sealed},
        PrepareStep{"s2", "spin", "coin", {{"h", ket2(0.0, 1.0)}, {"t", ket2(1.0, 0.0)}}},
        // Superfluous by construction; kept to mirror the four-observer setup.
        MeasureStep{"s3", "F", computational_basis(*s.registry, "spin"), Visibility::Sealed},
        MeasureStep{"s4", "Wbar", computational_basis(*s.registry, "coin"), Visibility::Open},
        AnnounceStep{"s5", "Wbar", "s4", {}},
        MeasureStep{"s6", "W", computational_basis(*s.registry, "spin"), Visibility::Open},
    };
    s.validate();
    return s;
}

MeasurementBasis planar_basis(const SpaceRegistry& registry, const std::string& target,
                              double angle) {
    return make_basis(registry, {target},
                      {{"+", ket2(std::cos(angle), std::sin(angle))},
                       {"-", ket2(-std::sin(angle), std::cos(angle))}});
}

namespace {

Eigen::Matrix2cd state_matrix(const StateVector& state) {
    if (state.registry->size() != 2 || state.registry->subsystems()[0].dimension() != 2 ||
        state.registry->subsystems()[1].dimension() != 2) {
        throw Error("Hardy check requires a two-qubit state");
    }
    Eigen::Matrix2cd m;
    m << state.amplitudes[0], state.amplitudes[1], state.amplitudes[2], state.amplitudes[3];
    return m;
}

Eigen::Vector2cd planar_ket(double angle) {
    return Eigen::Vector2cd(std::cos(angle), std::sin(angle));
}

double wrap_angle(double x) {
    const double pi = M_PI;
    x = std::fmod(x, pi);
    if (x < 0) x += pi;
    return x;
}

// Angle x in [0, pi) minimizing |v0 cos x + v1 sin x|^2 (exactly zero for
// real v up to round-off).
double zeroing_angle(const Eigen::Vector2cd& v) {
    double alpha = std::norm(v[0]);
    double beta = std::norm(v[1]);
    double gamma = 2.0 * std::real(v[0] * std::conj(v[1]));
    if (alpha < 1e-30 && beta < 1e-30) return 0.0;
    // |amp|^2 = (alpha+beta)/2 + (alpha-beta)/2 cos 2x + gamma/2 sin 2x.
    double two_x = std::atan2(-gamma, -(alpha - beta));
    return wrap_angle(0.5 * two_x);
}

}  // namespace

HardyResult hardy_probability(const StateVector& state, const HardySettings& settings) {
    Eigen::Matrix2cd m = state_matrix(state);
    const double half_pi = M_PI / 2.0;
    auto joint = [&](double a, double b) {
        return std::norm((planar_ket(a).transpose() * m * planar_ket(b)).value());
    };
    HardyResult result;
    result.settings = settings;
    result.joint_probability = joint(settings.a1, settings.b1);
    result.constraint_residuals = {{
        joint(settings.a1, settings.b2 + half_pi),  // P(A1=+, B2=-)
        joint(settings.a2 + half_pi, settings.b1),  // P(A2=-, B1=+)
        joint(settings.a2, settings.b2),            // P(A2=+, B2=+)
    }};
    return result;
}

HardyResult hardy_search(const StateVector& state, double grid_step_degrees) {
    if (grid_step_degrees <= 0.0 || grid_step_degrees > 10.0) {
        throw Error("hardy_search: grid resolution must be in (0, 10] degrees");
    }
    Eigen::Matrix2cd m = state_matrix(state);
    const double half_pi = M_PI / 2.0;
    const double step = grid_step_degrees * M_PI / 180.0;

    HardyResult best;  // zero-witness default
    bool have_best = false;
    for (double b1 = 0.0; b1 < M_PI - 1e-12; b1 += step) {
        // P(A2=-, B1=+) = 0 fixes a2; P(A2=+, B2=+) = 0 fixes b2;
        // P(A1=+, B2=-) = 0 fixes a1.
        double a2 = wrap_angle(zeroing_angle(m * planar_ket(b1)) - half_pi);
        double b2 = zeroing_angle(m.transpose() * planar_ket(a2));
        double a1 = zeroing_angle(m * planar_ket(b2 + half_pi));
        HardyResult candidate = hardy_probability(state, {a1, a2, b1, b2});
        if (candidate.constraint_residuals[0] > 1e-6 ||
            candidate.constraint_residuals[1] > 1e-6 ||
            candidate.constraint_residuals[2] > 1e-6) {
            continue;
        }
        auto key = [](const HardyResult& r) {
            return std::tuple(-r.joint_probability, r.settings.a1, r.settings.a2, r.settings.b1,
                              r.settings.b2);
        };
        if (!have_best || key(candidate) < key(best)) {
            best = candidate;
            have_best = true;
        }
    }
    return best;
}

StateVector singlet_state() {
    auto registry = std::make_shared<SpaceRegistry>(std::vector<Subsystem>{
        {"q1", {"u", "d"}},
        {"q2", {"u", "d"}},
    });
    Vector init = Vector::Zero(4);
    init[1] = kInvSqrt2;   // |u,d>
    init[2] = -kInvSqrt2;  // |d,u>
    return make_state(std::move(registry), std::move(init));
}

StateVector schmidt_state(double theta) {
    auto registry = std::make_shared<SpaceRegistry>(std::vector<Subsystem>{
        {"q1", {"u", "d"}},
        {"q2", {"u", "d"}},
    });
    Vector init = Vector::Zero(4);
    init[0] = std::cos(theta);  // |u,u>
    init[3] = std::sin(theta);  // |d,d>
    return make_state(std::move(registry), std::move(init));
}

}  // namespace wigner
