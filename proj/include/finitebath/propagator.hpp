// propagator.hpp: Exact propagation of the full pure state
//
// H is block diagonal in the layout of state.hpp: the resonant block
// span{|1,n1>, |0,n2>} is diagonalized once; the two sectors annihilated by V
// only pick up phases. evolve() is exact for any real t, including t < 0.
// evolve_ode() is an independent oracle that never touches the eigenpairs.

#pragma once

#include "finitebath/errors.hpp"
#include "finitebath/model.hpp"
#include "finitebath/ode.hpp"
#include "finitebath/state.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

namespace finitebath {

struct BlockDecomposition {
    BasisLayout layout;
    Eigen::MatrixXcd coupled;        // [[diag(dE + e1), lambda C], [lambda C^+, diag(e2)]]
    Eigen::VectorXd ground_lower;    // energies of |0,n1>
    Eigen::VectorXd excited_upper;   // energies of |1,n2>
};

inline BlockDecomposition decompose(const FiniteBathModel& m) {
    BlockDecomposition b;
    b.layout = BasisLayout(m);
    const auto& l = b.layout;
    const Eigen::VectorXd diag = diagonal_energies(m);
    b.coupled = Eigen::MatrixXcd::Zero(l.coupled_dim(), l.coupled_dim());
    b.coupled.diagonal() = diag.head(l.coupled_dim()).cast<cplx>();
    const double lambda = m.params().lambda;
    b.coupled.block(0, l.n1, l.n1, l.n2) = lambda * m.coupling().entries;
    b.coupled.block(l.n1, 0, l.n2, l.n1) = lambda * m.coupling().entries.adjoint();
    b.ground_lower = diag.segment(l.ground_lower(), l.n1);
    b.excited_upper = diag.segment(l.excited_upper(), l.n2);
    return b;
}

class SpectralPropagator {
public:
    explicit SpectralPropagator(const BlockDecomposition& blocks)
        : layout_(blocks.layout), ground_lower_(blocks.ground_lower), excited_upper_(blocks.excited_upper) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(blocks.coupled);
        if (solver.info() != Eigen::Success) {
            std::ostringstream msg;
            msg << "SpectralPropagator: eigensolver did not converge (coupled block dimension "
                << blocks.coupled.rows() << ", n1 = " << layout_.n1 << ", n2 = " << layout_.n2 << ")";
            throw NumericalError(msg.str());
        }
        eigenvalues_ = solver.eigenvalues();
        eigenvectors_ = solver.eigenvectors();
    }

    const BasisLayout& layout() const noexcept { return layout_; }
    const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
    const Eigen::MatrixXcd& eigenvectors() const noexcept { return eigenvectors_; }
    const Eigen::VectorXd& ground_lower_energies() const noexcept { return ground_lower_; }
    const Eigen::VectorXd& excited_upper_energies() const noexcept { return excited_upper_; }

    // Eigen-basis coefficients of the coupled-block component.
    Eigen::VectorXcd to_eigenbasis(const PureState& s) const {
        check_layout(s);
        return eigenvectors_.adjoint() * s.coupled();
    }

    PureState evolve(const PureState& s, double t) const {
        check_layout(s);
        PureState out{layout_};
        if (t == 0.0) {
            out.amplitudes = s.amplitudes;
            return out;
        }
        const Eigen::VectorXcd coeff = to_eigenbasis(s);
        out.coupled().noalias() = eigenvectors_ * coeff.cwiseProduct(phases(eigenvalues_, t));
        out.ground_lower() = s.ground_lower().cwiseProduct(phases(ground_lower_, t));
        out.excited_upper() = s.excited_upper().cwiseProduct(phases(excited_upper_, t));
        return out;
    }

    // Calls visit(index, state) for every grid time, in grid order. The coupled
    // block is reconstructed for `chunk` times at once with a single matrix product.
    template <typename Visitor>
    void for_each_time(const PureState& s, std::span<const double> t_grid, Visitor&& visit,
                       Eigen::Index chunk = 256) const {
        check_layout(s);
        const Eigen::VectorXcd coeff = to_eigenbasis(s);
        const Eigen::Index nc = layout_.coupled_dim();
        Eigen::MatrixXcd weighted(nc, chunk);
        Eigen::MatrixXcd block(nc, chunk);
        PureState current{layout_};
        const auto total = static_cast<Eigen::Index>(t_grid.size());
        for (Eigen::Index start = 0; start < total; start += chunk) {
            const Eigen::Index cols = std::min(chunk, total - start);
            for (Eigen::Index c = 0; c < cols; ++c) {
                weighted.col(c) = coeff.cwiseProduct(phases(eigenvalues_, t_grid[static_cast<std::size_t>(start + c)]));
            }
            block.leftCols(cols).noalias() = eigenvectors_ * weighted.leftCols(cols);
            for (Eigen::Index c = 0; c < cols; ++c) {
                const double t = t_grid[static_cast<std::size_t>(start + c)];
                if (t == 0.0) {
                    current.amplitudes = s.amplitudes;
                } else {
                    current.coupled() = block.col(c);
                    current.ground_lower() = s.ground_lower().cwiseProduct(phases(ground_lower_, t));
                    current.excited_upper() = s.excited_upper().cwiseProduct(phases(excited_upper_, t));
                }
                visit(static_cast<std::size_t>(start + c), std::as_const(current));
            }
        }
    }

    // max |U diag(E) U^+ - H_c|
    double reconstruction_residual(const Eigen::MatrixXcd& coupled) const {
        const Eigen::MatrixXcd r =
            eigenvectors_ * eigenvalues_.cast<cplx>().asDiagonal() * eigenvectors_.adjoint() - coupled;
        return r.cwiseAbs().maxCoeff();
    }

    // max |U^+ U - 1|
    double orthonormality_defect() const {
        const auto n = eigenvectors_.cols();
        return (eigenvectors_.adjoint() * eigenvectors_ - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
    }

private:
    static Eigen::VectorXcd phases(const Eigen::VectorXd& energies, double t) {
        Eigen::VectorXcd p(energies.size());
        for (Eigen::Index k = 0; k < energies.size(); ++k) {
            const double a = -energies(k) * t;
            p(k) = cplx(std::cos(a), std::sin(a));
        }
        return p;
    }

    void check_layout(const PureState& s) const {
        if (!(s.layout == layout_) || s.amplitudes.size() != layout_.dim())
            throw ValidationError("SpectralPropagator: state does not match the model's basis layout");
    }

    BasisLayout layout_;
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXcd eigenvectors_;
    Eigen::VectorXd ground_lower_;
    Eigen::VectorXd excited_upper_;
};

inline SpectralPropagator build_propagator(const FiniteBathModel& m) { return SpectralPropagator(decompose(m)); }

inline PureState evolve(const SpectralPropagator& prop, const PureState& s, double t) { return prop.evolve(s, t); }

// Oracle propagation by direct integration of i d|psi>/dt = H |psi>.
//
// Integrated in the interaction picture of H0: a(t) = exp(i H0 t) psi(t) obeys
// da/dt = -i exp(i H0 t) V exp(-i H0 t) a, whose right-hand side only carries the
// slow detunings inside the bands. V is applied straight from the coupling matrix.
inline std::vector<PureState> evolve_ode(const FiniteBathModel& m, const PureState& s0,
                                         std::span<const double> t_grid, double tol = 1e-10) {
    if (!t_grid.empty() && t_grid.front() < 0.0) throw ValidationError("evolve_ode: time grid must start at t >= 0");
    if (!t_grid.empty() && t_grid.front() > 0.0) {
        // The interaction picture is anchored at t = 0.
        std::vector<double> shifted(t_grid.begin(), t_grid.end());
        shifted.insert(shifted.begin(), 0.0);
        auto all = evolve_ode(m, s0, shifted, tol);
        all.erase(all.begin());
        return all;
    }
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1])) throw ValidationError("evolve_ode: time grid must be increasing");

    const Eigen::VectorXd e0 = diagonal_energies(m);
    auto rotate = [&](const Eigen::VectorXcd& v, double t, double sign) {
        Eigen::VectorXcd out(v.size());
        for (Eigen::Index k = 0; k < v.size(); ++k) {
            const double a = sign * e0(k) * t;
            out(k) = v(k) * cplx(std::cos(a), std::sin(a));
        }
        return out;
    };
    auto rhs = [&](double t, const Eigen::VectorXcd& a) -> Eigen::VectorXcd {
        const Eigen::VectorXcd psi = rotate(a, t, -1.0);
        return cplx(0.0, -1.0) * rotate(apply_coupling(m, psi), t, +1.0);
    };
    ode::Options opt;
    opt.rtol = tol;
    opt.atol = tol;
    const auto interaction = ode::integrate(rhs, s0.amplitudes, t_grid, opt);

    std::vector<PureState> out;
    out.reserve(interaction.size());
    for (std::size_t i = 0; i < interaction.size(); ++i) {
        PureState s{s0.layout};
        s.amplitudes = rotate(interaction[i], t_grid[i], -1.0);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace finitebath
