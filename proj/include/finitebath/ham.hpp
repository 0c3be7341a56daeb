// ham.hpp: Rate-equation prediction for the spin and the Born-approximation equilibrium
//
//   d rho11/dt = -(R10 + R01) rho11 + R10 * p_c0
//   d rho01/dt = (i dE - R01 / 2) rho01
//   R01 = 2 pi lambda^2 N2 / band_width,  R10 = 2 pi lambda^2 N1 / band_width   (hbar = 1)
//
// p_c0 is the weight of the initial state inside the resonant block. Setting
// p_c0 = rho11(0) gives the textbook scheme, which only holds when all of the
// block weight starts in |1, lower band>.

#pragma once

#include "finitebath/errors.hpp"
#include "finitebath/model.hpp"
#include "finitebath/ode.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <sstream>
#include <vector>

namespace finitebath::ham {

struct Rates {
    double r01{0.0};  // downward (excited -> ground)
    double r10{0.0};  // upward

    double total() const noexcept { return r01 + r10; }
};

// Thrown for band_width = 0, where the scheme does not apply.
class RatesUndefined : public ValidationError {
public:
    explicit RatesUndefined(ConditionReport report)
        : ValidationError("HAM rates undefined: band_width = 0 is outside the Markovian regime"),
          report_(std::move(report)) {}
    const ConditionReport& report() const noexcept { return report_; }

private:
    ConditionReport report_;
};

inline Rates rates(const ModelParams& p) {
    validate(p);
    if (!(p.band_width > 0.0)) throw RatesUndefined(check_conditions(p));
    const double g = 2.0 * std::numbers::pi * p.lambda * p.lambda / p.band_width;
    return {g * static_cast<double>(p.n2), g * static_cast<double>(p.n1)};
}

inline double equilibrium_rho11(const Rates& r, double p_c0) {
    return r.total() > 0.0 ? p_c0 * r.r10 / r.total() : std::numeric_limits<double>::quiet_NaN();
}

namespace detail {
inline void check_populations(double rho11_0, double p_c0) {
    constexpr double slack = 1e-9;
    if (!(rho11_0 >= -slack && p_c0 <= 1.0 + slack && rho11_0 <= p_c0 + slack)) {
        std::ostringstream msg;
        msg << "ham: need 0 <= rho11(0) <= p_c0 <= 1, got rho11(0) = " << rho11_0 << ", p_c0 = " << p_c0;
        throw ValidationError(msg.str());
    }
}
}  // namespace detail

inline std::vector<double> predict_rho11(const Rates& r, double rho11_0, double p_c0, std::span<const double> t_grid) {
    detail::check_populations(rho11_0, p_c0);
    std::vector<double> out(t_grid.size());
    const double k = r.total();
    if (!(k > 0.0)) {
        std::fill(out.begin(), out.end(), rho11_0);
        return out;
    }
    const double inf = equilibrium_rho11(r, p_c0);
    for (std::size_t i = 0; i < t_grid.size(); ++i) out[i] = inf + (rho11_0 - inf) * std::exp(-k * t_grid[i]);
    return out;
}

// Paper-literal form: the source term uses rho11(0).
inline std::vector<double> predict_rho11(const Rates& r, double rho11_0, std::span<const double> t_grid) {
    return predict_rho11(r, rho11_0, rho11_0, t_grid);
}

inline std::vector<cplx> predict_rho01(const Rates& r, cplx rho01_0, double delta_e, std::span<const double> t_grid) {
    if (std::abs(rho01_0) > 0.5 + 1e-12) {
        std::ostringstream msg;
        msg << "ham: |rho01(0)| = " << std::abs(rho01_0) << " exceeds 1/2";
        throw ValidationError(msg.str());
    }
    std::vector<cplx> out(t_grid.size());
    const cplx gen(-0.5 * r.r01, delta_e);
    for (std::size_t i = 0; i < t_grid.size(); ++i) out[i] = rho01_0 * std::exp(gen * t_grid[i]);
    return out;
}

// Numerical integration of the rho11 equation, cross-check of the closed form.
inline std::vector<double> integrate_rho11(const Rates& r, double rho11_0, double p_c0, std::span<const double> t_grid,
                                           double tol = 1e-13) {
    detail::check_populations(rho11_0, p_c0);
    using Vec = Eigen::Matrix<double, 1, 1>;
    auto rhs = [&](double, const Vec& y) -> Vec { return Vec(-r.total() * y(0) + r.r10 * p_c0); };
    ode::Options opt;
    opt.rtol = tol;
    opt.atol = tol;
    const auto ys = ode::integrate(rhs, Vec(rho11_0), t_grid, opt);
    std::vector<double> out(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) out[i] = ys[i](0);
    return out;
}

// Thermal excited-state population of a two-level system with gap delta_e.
inline double ba_equilibrium(double delta_e, double kt_bath) {
    if (!(kt_bath > 0.0)) throw ValidationError("ba_equilibrium: kT of the bath must be > 0");
    return 1.0 / (1.0 + std::exp(delta_e / kt_bath));
}

}  // namespace finitebath::ham
