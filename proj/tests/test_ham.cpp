#include "finitebath/ham.hpp"
#include "finitebath/observables.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace finitebath;

TEST(Rates, PaperValues) {
    const auto r = ham::rates(paper_params());
    // 2 pi (5e-4)^2 500 / 0.5 = pi / 2000
    EXPECT_NEAR(r.r01, std::numbers::pi / 2000.0, 1e-18);
    EXPECT_NEAR(r.r01, 1.5708e-3, 1e-7);
    EXPECT_EQ(r.r01, r.r10);
    EXPECT_NEAR(1.0 / r.r01, 636.6, 0.05);
}

TEST(Rates, Scaling) {
    auto p = paper_params();
    const auto base = ham::rates(p);
    p.lambda *= 2.0;
    const auto twice = ham::rates(p);
    EXPECT_DOUBLE_EQ(twice.r01, 4.0 * base.r01);
    EXPECT_DOUBLE_EQ(twice.r10, 4.0 * base.r10);
    p = paper_params();
    p.n2 *= 2;
    const auto wide = ham::rates(p);
    EXPECT_DOUBLE_EQ(wide.r01, 2.0 * base.r01);
    EXPECT_DOUBLE_EQ(wide.r10, base.r10);
    EXPECT_DOUBLE_EQ(wide.r01 / wide.r10, 2.0);
    p = paper_params();
    p.lambda = 0.0;
    EXPECT_EQ(ham::rates(p).total(), 0.0);
}

TEST(Rates, UndefinedForDegenerateBand) {
    auto p = paper_params();
    p.band_width = 0.0;
    p.lambda = 1e-4;
    try {
        ham::rates(p);
        FAIL();
    } catch (const ham::RatesUndefined& e) {
        EXPECT_FALSE(e.report().pass);
        EXPECT_TRUE(std::isinf(e.report().criterion_two));
    }
}

TEST(PredictRho11, ClosedFormValues) {
    const auto r = ham::rates(paper_params());
    const double t1 = 1.0 / r.total();
    EXPECT_NEAR(t1, 318.3, 0.05);
    const std::vector<double> grid = {0.0, t1, 1e6};
    const auto y = ham::predict_rho11(r, 1.0, 1.0, grid);
    EXPECT_EQ(y[0], 1.0);
    EXPECT_NEAR(y[1], 0.5 * (1.0 + std::exp(-1.0)), 1e-14);
    EXPECT_NEAR(y[1], 0.6839, 5e-5);
    EXPECT_NEAR(y[2], 0.5, 1e-12);
}

TEST(PredictRho11, LiteralAndGeneralizedSources) {
    const auto r = ham::rates(paper_params());
    const std::vector<double> far = {1e6};
    EXPECT_NEAR(ham::predict_rho11(r, 0.75, far)[0], 0.375, 1e-12);
    EXPECT_NEAR(ham::predict_rho11(r, 0.75, 1.0, far)[0], 0.5, 1e-12);
    EXPECT_NEAR(ham::predict_rho11(r, 0.0, 1.0, far)[0], r.r10 / r.total(), 1e-12);
    EXPECT_THROW(ham::predict_rho11(r, 0.8, 0.5, far), ValidationError);
    EXPECT_THROW(ham::predict_rho11(r, -0.1, 0.5, far), ValidationError);
}

TEST(PredictRho11, UnequalBandsEquilibrium) {
    auto p = paper_params();
    p.n1 = 300;
    p.n2 = 700;
    const auto r = ham::rates(p);
    EXPECT_NEAR(ham::equilibrium_rho11(r, 1.0), 300.0 / 1000.0, 1e-15);
}

TEST(PredictRho11, SatisfiesRateEquation) {
    // Central differences of the closed form against the literal right-hand side.
    const auto r = ham::rates(paper_params());
    const double h = 1e-2;
    const auto grid = uniform_grid(0.0, 2000.0, h);
    const auto y = ham::predict_rho11(r, 1.0, grid);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        const double dy = (y[i + 1] - y[i - 1]) / (2.0 * h);
        worst = std::max(worst, std::abs(dy + r.total() * y[i] - r.r10 * 1.0));
    }
    EXPECT_LE(worst, 1e-12);
}

TEST(PredictRho11, ClosedFormAgreesWithIntegrator) {
    const auto r = ham::rates(paper_params());
    const auto grid = uniform_grid(0.0, 2000.0, 1.0);
    for (auto [a, b] : {std::pair{1.0, 1.0}, std::pair{0.75, 1.0}, std::pair{0.0, 1.0}}) {
        const auto closed = ham::predict_rho11(r, a, b, grid);
        const auto num = ham::integrate_rho11(r, a, b, grid);
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) worst = std::max(worst, std::abs(closed[i] - num[i]));
        EXPECT_LE(worst, 1e-9);
    }
    const auto zero = ham::integrate_rho11(ham::Rates{}, 0.3, 1.0, grid);
    for (double v : zero) EXPECT_EQ(v, 0.3);
}

TEST(PredictRho01, DecayAndPhase) {
    const auto r = ham::rates(paper_params());
    const double t2 = 2.0 / r.r01;
    EXPECT_NEAR(t2, 1273.2, 0.05);
    const std::vector<double> grid = {0.0, t2};
    const auto c = ham::predict_rho01(r, {0.5, 0.0}, 25.0, grid);
    EXPECT_EQ(c[0], cplx(0.5, 0.0));
    EXPECT_NEAR(std::norm(c[1]), 0.25 * std::exp(-2.0), 1e-15);
    EXPECT_NEAR(std::norm(c[1]), 0.0338, 5e-5);
    // Modulus does not depend on delta_e; the phase advances at delta_e.
    EXPECT_NEAR(std::abs(ham::predict_rho01(r, {0.5, 0.0}, 3.0, grid)[1]), std::abs(c[1]), 1e-15);
    const std::vector<double> small = {0.01};
    EXPECT_NEAR(std::arg(ham::predict_rho01(r, {0.5, 0.0}, 25.0, small)[0]), 0.25, 1e-12);
    EXPECT_THROW(ham::predict_rho01(r, {0.6, 0.0}, 25.0, grid), ValidationError);
}

TEST(PredictRho01, MonotoneModulus) {
    const auto r = ham::rates(paper_params());
    const auto grid = uniform_grid(0.0, 3000.0, 10.0);
    const auto c = ham::predict_rho01(r, {0.3, 0.2}, 25.0, grid);
    for (std::size_t i = 1; i < c.size(); ++i) EXPECT_LT(std::abs(c[i]), std::abs(c[i - 1]));
}

TEST(BornApproximation, Equilibrium) {
    EXPECT_NEAR(ham::ba_equilibrium(25.0, 5.0), std::exp(-5.0) / (1.0 + std::exp(-5.0)), 1e-16);
    EXPECT_NEAR(ham::ba_equilibrium(25.0, 5.0), 0.00669, 5e-6);
    EXPECT_NEAR(ham::ba_equilibrium(25.0, 1e12), 0.5, 1e-10);
    EXPECT_NEAR(ham::ba_equilibrium(25.0, 1e-3), 0.0, 1e-300);
    EXPECT_THROW(ham::ba_equilibrium(25.0, 0.0), ValidationError);
}
