// state.hpp: Product-basis layout, pure states and initial-state preparation

#pragma once

#include "finitebath/errors.hpp"
#include "finitebath/model.hpp"
#include "finitebath/random.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <sstream>

namespace finitebath {

// Amplitude ordering over the 2(n1 + n2) product states:
//   [ |1,n1> (n1) | |0,n2> (n2) ]   resonant block coupled by V
//   [ |0,n1> (n1) ]                 decoupled, phase only
//   [ |1,n2> (n2) ]                 decoupled, phase only
struct BasisLayout {
    Eigen::Index n1{0};
    Eigen::Index n2{0};

    BasisLayout() = default;
    BasisLayout(std::size_t lower, std::size_t upper)
        : n1(static_cast<Eigen::Index>(lower)), n2(static_cast<Eigen::Index>(upper)) {}
    explicit BasisLayout(const FiniteBathModel& m) : BasisLayout(m.n1(), m.n2()) {}

    Eigen::Index coupled_dim() const noexcept { return n1 + n2; }
    Eigen::Index dim() const noexcept { return 2 * (n1 + n2); }

    Eigen::Index excited_lower() const noexcept { return 0; }
    Eigen::Index ground_upper() const noexcept { return n1; }
    Eigen::Index ground_lower() const noexcept { return n1 + n2; }
    Eigen::Index excited_upper() const noexcept { return 2 * n1 + n2; }

    friend bool operator==(const BasisLayout&, const BasisLayout&) = default;
};

struct PureState {
    BasisLayout layout;
    Eigen::VectorXcd amplitudes;

    PureState() = default;
    explicit PureState(const BasisLayout& l) : layout(l), amplitudes(Eigen::VectorXcd::Zero(l.dim())) {}

    auto excited_lower() { return amplitudes.segment(layout.excited_lower(), layout.n1); }
    auto ground_upper() { return amplitudes.segment(layout.ground_upper(), layout.n2); }
    auto ground_lower() { return amplitudes.segment(layout.ground_lower(), layout.n1); }
    auto excited_upper() { return amplitudes.segment(layout.excited_upper(), layout.n2); }
    auto coupled() { return amplitudes.head(layout.coupled_dim()); }

    auto excited_lower() const { return amplitudes.segment(layout.excited_lower(), layout.n1); }
    auto ground_upper() const { return amplitudes.segment(layout.ground_upper(), layout.n2); }
    auto ground_lower() const { return amplitudes.segment(layout.ground_lower(), layout.n1); }
    auto excited_upper() const { return amplitudes.segment(layout.excited_upper(), layout.n2); }
    auto coupled() const { return amplitudes.head(layout.coupled_dim()); }

    double norm() const { return amplitudes.norm(); }
};

// Unperturbed energies in layout order.
inline Eigen::VectorXd diagonal_energies(const FiniteBathModel& m) {
    const BasisLayout l(m);
    Eigen::VectorXd e(l.dim());
    const double gap = m.spin_gap();
    for (Eigen::Index k = 0; k < l.n1; ++k) {
        const double eps = m.lower_levels()[static_cast<std::size_t>(k)];
        e(l.excited_lower() + k) = gap + eps;
        e(l.ground_lower() + k) = eps;
    }
    for (Eigen::Index k = 0; k < l.n2; ++k) {
        const double eps = m.upper_levels()[static_cast<std::size_t>(k)];
        e(l.ground_upper() + k) = eps;
        e(l.excited_upper() + k) = gap + eps;
    }
    return e;
}

// V |psi> straight from the coupling matrix.
inline Eigen::VectorXcd apply_coupling(const FiniteBathModel& m, const Eigen::VectorXcd& psi) {
    const BasisLayout l(m);
    const double lambda = m.params().lambda;
    const auto& c = m.coupling().entries;
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(l.dim());
    out.segment(l.excited_lower(), l.n1).noalias() = lambda * (c * psi.segment(l.ground_upper(), l.n2));
    out.segment(l.ground_upper(), l.n2).noalias() = lambda * (c.adjoint() * psi.segment(l.excited_lower(), l.n1));
    return out;
}

// H |psi> = H0 |psi> + V |psi>.
inline Eigen::VectorXcd apply_hamiltonian(const FiniteBathModel& m, const Eigen::VectorXcd& psi) {
    Eigen::VectorXcd out = apply_coupling(m, psi);
    out += diagonal_energies(m).cwiseProduct(psi);
    return out;
}

inline double energy_expectation(const FiniteBathModel& m, const PureState& s) {
    return s.amplitudes.dot(apply_hamiltonian(m, s.amplitudes)).real();
}

// ----------------------------- Initial states --------------------------------

// |1> (x) |chi>, chi Haar-random on the lower band.
inline PureState initial_state_excited(const FiniteBathModel& m, std::uint64_t bath_seed) {
    PureState s{BasisLayout(m)};
    s.excited_lower() = rng::haar_unit_vector(bath_seed, rng::Stream::bath_state, s.layout.n1);
    return s;
}

// (|0> + |1>)/sqrt(2) (x) |chi>. Only the |1>-part lives in the coupled block.
inline PureState initial_state_superposition(const FiniteBathModel& m, std::uint64_t bath_seed) {
    PureState s{BasisLayout(m)};
    const Eigen::VectorXcd chi = rng::haar_unit_vector(bath_seed, rng::Stream::bath_state, s.layout.n1);
    s.excited_lower() = chi * std::sqrt(0.5);
    s.ground_lower() = chi * std::sqrt(0.5);
    return s;
}

// sqrt(p) |a> + sqrt(1-p) |b>, a Haar-random in span{|1,n1>}, b in span{|0,n2>}.
// The weights are exact, not sampled.
inline PureState initial_state_subspace_random(const FiniteBathModel& m, double p_excited, std::uint64_t seed) {
    if (!(p_excited >= 0.0 && p_excited <= 1.0)) {
        std::ostringstream msg;
        msg << "initial_state_subspace_random: p_excited = " << p_excited << " outside [0, 1]";
        throw ValidationError(msg.str());
    }
    PureState s{BasisLayout(m)};
    s.excited_lower() = std::sqrt(p_excited) * rng::haar_unit_vector(seed, rng::Stream::lower_component, s.layout.n1);
    s.ground_upper() =
        std::sqrt(1.0 - p_excited) * rng::haar_unit_vector(seed, rng::Stream::upper_component, s.layout.n2);
    return s;
}

}  // namespace finitebath
