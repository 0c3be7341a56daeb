// ode.hpp: Adaptive Dormand–Prince 5(4) integrator
//
// Generic over any Eigen dense vector type (real or complex). Error control is
// the usual mixed criterion |err_i| <= atol + rtol * max(|y_i|, |y_new_i|) in the
// RMS norm, with the 5th-order solution propagated (local extrapolation).

#pragma once

#include "finitebath/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>
#include <sstream>
#include <vector>

namespace finitebath::ode {

struct Options {
    double rtol{1e-10};
    double atol{1e-10};
    double initial_step{0.0};  // 0 = automatic
    double max_step{0.0};      // 0 = unbounded
    double min_step{1e-14};    // relative to |t|+1; below this the step has underflowed
    std::size_t max_steps{50'000'000};
};

struct Stats {
    std::size_t accepted{0};
    std::size_t rejected{0};
};

namespace dp {
// Butcher tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b_hat (4th-order embedded weights).
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace dp

// Integrate y' = f(t, y) from t_grid.front() and return y at every grid point.
// `t_grid` must be non-decreasing; the first entry returns y0 unchanged.
template <typename Vec, typename Rhs>
std::vector<Vec> integrate(Rhs&& f, const Vec& y0, std::span<const double> t_grid, const Options& opt = {},
                           Stats* stats = nullptr) {
    std::vector<Vec> out;
    if (t_grid.empty()) return out;
    out.reserve(t_grid.size());
    out.push_back(y0);
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (t_grid[i] < t_grid[i - 1]) throw ValidationError("ode::integrate: time grid must be non-decreasing");
    }

    Vec y = y0;
    double t = t_grid.front();
    Vec k1 = f(t, y);
    double h = opt.initial_step;
    if (h <= 0.0) {
        const double span = t_grid.back() - t;
        const double scale = opt.atol + opt.rtol * y.cwiseAbs().maxCoeff();
        const double d1 = k1.cwiseAbs().maxCoeff();
        h = d1 > 0.0 ? 0.01 * std::pow(scale / d1, 0.2) : span;
        if (!(h > 0.0)) h = 1e-6;
        if (span > 0.0) h = std::min(h, span);
    }
    Stats st;
    auto err_norm = [&](const Vec& err, const Vec& ya, const Vec& yb) {
        const auto n = static_cast<double>(err.size());
        double acc = 0.0;
        for (Eigen::Index i = 0; i < err.size(); ++i) {
            const double sc = opt.atol + opt.rtol * std::max(std::abs(ya(i)), std::abs(yb(i)));
            const double r = std::abs(err(i)) / sc;
            acc += r * r;
        }
        return std::sqrt(acc / n);
    };

    for (std::size_t gi = 1; gi < t_grid.size(); ++gi) {
        const double target = t_grid[gi];
        while (t < target) {
            if (opt.max_step > 0.0) h = std::min(h, opt.max_step);
            const bool last = t + h >= target;
            const double hs = last ? target - t : h;
            if (hs < opt.min_step * (std::abs(t) + 1.0)) {
                std::ostringstream msg;
                msg << "ode::integrate: step size underflow (h = " << hs << " at t = " << t << ")";
                throw NumericalError(msg.str());
            }
            if (st.accepted + st.rejected >= opt.max_steps) throw NumericalError("ode::integrate: step budget exhausted");

            using namespace dp;
            const Vec k2 = f(t + c2 * hs, (y + hs * a21 * k1).eval());
            const Vec k3 = f(t + c3 * hs, (y + hs * (a31 * k1 + a32 * k2)).eval());
            const Vec k4 = f(t + c4 * hs, (y + hs * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
            const Vec k5 = f(t + c5 * hs, (y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
            const Vec k6 = f(t + hs, (y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
            const Vec y_new = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            const double t_new = last ? target : t + hs;
            const Vec k7 = f(t_new, y_new);
            const Vec err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            const double en = err_norm(err, y, y_new);

            if (en <= 1.0) {
                t = t_new;
                y = y_new;
                k1 = k7;
                ++st.accepted;
                const double fac = en > 0.0 ? std::min(5.0, 0.9 * std::pow(en, -0.2)) : 5.0;
                // A step shortened to hit the grid point does not shrink the proposal.
                h = last ? std::max(h, hs * fac) : hs * fac;
            } else {
                ++st.rejected;
                h = hs * std::max(0.2, 0.9 * std::pow(en, -0.2));
            }
        }
        out.push_back(y);
    }
    if (stats) *stats = st;
    return out;
}

}  // namespace finitebath::ode
