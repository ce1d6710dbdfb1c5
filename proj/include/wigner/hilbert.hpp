#pragma once

#include <complex>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace wigner {

using Amplitude = std::complex<double>;
using Vector = Eigen::VectorXcd;

// Global comparison tolerance; exact-zero checks use kZeroTol.
inline constexpr double kTol = 1e-9;
inline constexpr double kZeroTol = 1e-12;

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct Subsystem {
    std::string name;
    std::vector<std::string> labels;

    int dimension() const { return static_cast<int>(labels.size()); }
    int label_index(const std::string& label) const;
};

// Ordered list of named subsystems. Amplitude layout is mixed-radix in
// declaration order: the first subsystem is the most significant digit,
// the last varies fastest.
class SpaceRegistry {
public:
    SpaceRegistry() = default;
    explicit SpaceRegistry(std::vector<Subsystem> subsystems);

    const std::vector<Subsystem>& subsystems() const { return subsystems_; }
    int size() const { return static_cast<int>(subsystems_.size()); }
    int total_dimension() const { return total_dim_; }

    bool has(const std::string& name) const;
    int index_of(const std::string& name) const;
    const Subsystem& subsystem(const std::string& name) const;

    // Flat index of an outcome-label tuple given in registry order.
    int flat_index(const std::vector<int>& digits) const;
    std::vector<int> digits_of(int flat) const;

    bool operator==(const SpaceRegistry& other) const;

private:
    std::vector<Subsystem> subsystems_;
    std::vector<int> strides_;
    int total_dim_ = 1;
};

struct StateVector {
    std::shared_ptr<const SpaceRegistry> registry;
    Vector amplitudes;

    int dimension() const { return static_cast<int>(amplitudes.size()); }
    double squared_norm() const { return amplitudes.squaredNorm(); }
};

StateVector make_state(std::shared_ptr<const SpaceRegistry> registry, Vector amplitudes);

// Unit vector with a single nonzero amplitude at the indexed position.
StateVector make_basis_state(std::shared_ptr<const SpaceRegistry> registry,
                             const std::map<std::string, std::string>& labels);

// Normalized linear combination. All terms must share one registry.
StateVector superpose(const std::vector<std::pair<Amplitude, StateVector>>& terms);

// Product state on the concatenated registry; subsystem names must not clash.
StateVector tensor(const StateVector& a, const StateVector& b);

// Conjugate-linear in the first argument.
Amplitude inner(const StateVector& a, const StateVector& b);

StateVector normalize(const StateVector& v);

bool same_registry(const StateVector& a, const StateVector& b);

}  // namespace wigner
