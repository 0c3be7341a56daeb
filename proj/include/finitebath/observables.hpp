// observables.hpp: Reduced spin state, entropy/purity/coherence, band kernel

#pragma once

#include "finitebath/errors.hpp"
#include "finitebath/model.hpp"
#include "finitebath/propagator.hpp"
#include "finitebath/state.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <sstream>
#include <vector>

namespace finitebath {

// 2x2 density matrix of the spin. Stored by its independent entries; rho10 = conj(rho01).
struct ReducedState {
    double rho00{1.0};
    double rho11{0.0};
    cplx rho01{0.0, 0.0};  // <0|rho|1>

    cplx rho10() const noexcept { return std::conj(rho01); }
    double trace() const noexcept { return rho00 + rho11; }

    // Eigenvalues in ascending order.
    std::array<double, 2> eigenvalues() const noexcept {
        const double mean = 0.5 * (rho00 + rho11);
        const double half = 0.5 * (rho00 - rho11);
        const double r = std::sqrt(half * half + std::norm(rho01));
        return {mean - r, mean + r};
    }

    Eigen::Matrix2cd matrix() const {
        Eigen::Matrix2cd m;
        m << rho00, rho01, rho10(), rho11;
        return m;
    }
};

inline constexpr double kNormTolerance = 1e-6;

// Partial trace over the bath. rho01 = sum_b c0(b) conj(c1(b)) with c_s(b) = <s,b|psi>.
inline ReducedState reduce(const PureState& s) {
    const double norm2 = s.amplitudes.squaredNorm();
    if (std::abs(std::sqrt(norm2) - 1.0) > kNormTolerance) {
        std::ostringstream msg;
        msg << "reduce: state is not normalized (norm = " << std::sqrt(norm2) << ")";
        throw ValidationError(msg.str());
    }
    ReducedState r;
    r.rho11 = s.excited_lower().squaredNorm() + s.excited_upper().squaredNorm();
    r.rho00 = s.ground_lower().squaredNorm() + s.ground_upper().squaredNorm();
    // Eigen's dot conjugates its first argument.
    r.rho01 = s.excited_lower().dot(s.ground_lower()) + s.excited_upper().dot(s.ground_upper());
    return r;
}

// Von Neumann entropy in nats.
inline double entropy(const ReducedState& rho) {
    double s = 0.0;
    for (double p : rho.eigenvalues()) {
        p = std::clamp(p, 0.0, 1.0);
        if (p > 0.0) s -= p * std::log(p);
    }
    return s;
}

inline double purity(const ReducedState& rho) {
    return rho.rho00 * rho.rho00 + rho.rho11 * rho.rho11 + 2.0 * std::norm(rho.rho01);
}

inline double coherence(const ReducedState& rho) { return std::norm(rho.rho01); }

// Total weight in the resonant block, conserved by the dynamics.
inline double coupled_probability(const PureState& s) { return s.coupled().squaredNorm(); }

// Throws when rho violates trace or positivity beyond `tol`.
inline void validate(const ReducedState& rho, double tol = 1e-10) {
    const auto ev = rho.eigenvalues();
    if (std::abs(rho.trace() - 1.0) > tol || ev[0] < -tol || !std::isfinite(ev[1])) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "reduced state invariant violated: trace = " << rho.trace() << ", min eigenvalue = " << ev[0];
        throw NumericalError(msg.str());
    }
}

// ----------------------------- Trajectories ----------------------------------

struct Trajectory {
    std::vector<double> t;
    std::vector<ReducedState> rho;
    std::vector<double> p_coupled;

    std::size_t size() const noexcept { return t.size(); }

    std::vector<double> rho11() const {
        std::vector<double> v(rho.size());
        std::transform(rho.begin(), rho.end(), v.begin(), [](const ReducedState& r) { return r.rho11; });
        return v;
    }
    std::vector<double> coherence() const {
        std::vector<double> v(rho.size());
        std::transform(rho.begin(), rho.end(), v.begin(), [](const ReducedState& r) { return finitebath::coherence(r); });
        return v;
    }
};

inline Trajectory sample_trajectory(const SpectralPropagator& prop, const PureState& s0, std::span<const double> t_grid) {
    Trajectory tr;
    tr.t.assign(t_grid.begin(), t_grid.end());
    tr.rho.resize(t_grid.size());
    tr.p_coupled.resize(t_grid.size());
    prop.for_each_time(s0, t_grid, [&](std::size_t i, const PureState& s) {
        tr.rho[i] = reduce(s);
        tr.p_coupled[i] = coupled_probability(s);
    });
    return tr;
}

// Uniform grid start, start + step, ..., up to and including stop (within rounding).
inline std::vector<double> uniform_grid(double start, double stop, double step) {
    if (!(step > 0.0) || !(stop >= start)) throw ValidationError("uniform_grid: need step > 0 and stop >= start");
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = start + step * static_cast<double>(i);
    return g;
}

// ----------------------------- Band kernel -----------------------------------

// f(t) = (1/n1) sum_k exp(-i e_k t) over the lower band levels.
inline std::vector<cplx> band_kernel(const FiniteBathModel& m, std::span<const double> t_grid) {
    const auto& levels = m.lower_levels();
    const double inv_n = 1.0 / static_cast<double>(levels.size());
    std::vector<cplx> f(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        double re = 0.0, im = 0.0;
        for (double e : levels) {
            const double a = -e * t_grid[i];
            re += std::cos(a);
            im += std::sin(a);
        }
        f[i] = {re * inv_n, im * inv_n};
    }
    return f;
}

struct KernelTimescales {
    double half_width{0.0};       // first t with |f| <= 1/2
    double e_fold_width{0.0};     // first t with |f| <= 1/e
    double first_minimum{0.0};    // first local minimum of |f|
    double recurrence_period{0.0};  // 2 pi n1 / band_width for equidistant levels
    double recurrence_value{0.0};   // |f| at recurrence_period
};

inline KernelTimescales band_kernel_timescales(const FiniteBathModel& m) {
    const double w = m.params().band_width;
    KernelTimescales ts;
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (!(w > 0.0)) {
        ts.half_width = ts.e_fold_width = ts.first_minimum = ts.recurrence_period = inf;
        ts.recurrence_value = 1.0;
        return ts;
    }
    auto absf = [&](double t) {
        const double tt[1] = {t};
        return std::abs(band_kernel(m, tt)[0]);
    };
    // Resolve the first lobe on a grid fine compared to 1/band_width, then bisect crossings.
    const double dt = 0.01 / w;
    const double t_end = 4.0 * std::numbers::pi / w;
    auto crossing = [&](double level) {
        double lo = 0.0;
        for (double t = dt; t <= t_end; t += dt) {
            if (absf(t) <= level) {
                double a = lo, b = t;
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (a + b);
                    (absf(mid) <= level ? b : a) = mid;
                }
                return b;
            }
            lo = t;
        }
        return inf;
    };
    ts.half_width = crossing(0.5);
    ts.e_fold_width = crossing(std::exp(-1.0));
    {
        double prev = absf(0.0), t = dt, cur = absf(t);
        while (t <= t_end) {
            const double next = absf(t + dt);
            if (cur <= prev && cur <= next) break;
            prev = cur;
            cur = next;
            t += dt;
        }
        // Golden-section refinement on [t - dt, t + dt].
        double a = std::max(0.0, t - dt), b = t + dt;
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        for (int it = 0; it < 80; ++it) {
            const double c = b - g * (b - a), d = a + g * (b - a);
            (absf(c) < absf(d) ? b : a) = (absf(c) < absf(d) ? d : c);
        }
        ts.first_minimum = 0.5 * (a + b);
    }
    ts.recurrence_period = 2.0 * std::numbers::pi * static_cast<double>(m.n1()) / w;
    ts.recurrence_value = absf(ts.recurrence_period);
    return ts;
}

}  // namespace finitebath
