#include "finitebath/metrics.hpp"
#include "finitebath/observables.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace finitebath;
using namespace finitebath::metrics;

namespace {
std::vector<double> sample(const std::vector<double>& t, double (*f)(double)) {
    std::vector<double> y(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) y[i] = f(t[i]);
    return y;
}
}  // namespace

TEST(Deviation, IdenticalIsZero) {
    const auto t = uniform_grid(0.0, 100.0, 1.0);
    const auto y = sample(t, [](double x) { return std::sin(x); });
    const auto d = deviation_d2(y, y, t, 100.0);
    EXPECT_EQ(d.d_squared, 0.0);
    EXPECT_EQ(d.d, 0.0);
    EXPECT_EQ(d.n_samples, 101u);
}

TEST(Deviation, ConstantOffsetExact) {
    const auto t = uniform_grid(0.0, 3000.0, 1.0);
    const auto a = sample(t, [](double x) { return 0.5 + 0.5 * std::exp(-x / 300.0); });
    std::vector<double> b(a);
    for (double& v : b) v += 0.03;
    const auto d = deviation_d2(a, b, t, 2000.0);
    EXPECT_NEAR(d.d_squared, 0.03 * 0.03, 1e-12);
    EXPECT_NEAR(d.d, 0.03, 1e-10);
    EXPECT_EQ(d.tau, 2000.0);
    EXPECT_EQ(d.grid_step, 1.0);
}

TEST(Deviation, PartialLastInterval) {
    // tau between grid points; D^2 of a linear difference t is tau^2 / 3 (trapezoid error only from the square).
    const auto t = uniform_grid(0.0, 10.0, 0.001);
    const auto a = sample(t, [](double x) { return x; });
    const std::vector<double> b(t.size(), 0.0);
    const auto d = deviation_d2(a, b, t, 7.0005);
    EXPECT_NEAR(d.d_squared, 7.0005 * 7.0005 / 3.0, 1e-5);
}

TEST(Deviation, SymmetricAndShiftInvariant) {
    const auto t = uniform_grid(0.0, 500.0, 0.5);
    const auto a = sample(t, [](double x) { return std::cos(0.01 * x); });
    const auto b = sample(t, [](double x) { return std::exp(-0.002 * x); });
    std::vector<double> a2(a), b2(b);
    for (auto& v : a2) v += 7.0;
    for (auto& v : b2) v += 7.0;
    const double d1 = deviation_d2(a, b, t, 400.0).d_squared;
    EXPECT_EQ(d1, deviation_d2(b, a, t, 400.0).d_squared);
    EXPECT_NEAR(d1, deviation_d2(a2, b2, t, 400.0).d_squared, 1e-12);
}

TEST(Deviation, GridRefinementConverges) {
    auto diff = [](double x) { return 0.02 * std::sin(0.05 * x) * std::exp(-x / 800.0); };
    const auto coarse = uniform_grid(0.0, 2000.0, 1.0);
    const auto fine = uniform_grid(0.0, 2000.0, 0.5);
    auto d2 = [&](const std::vector<double>& t) {
        std::vector<double> a(t.size()), z(t.size(), 0.0);
        for (std::size_t i = 0; i < t.size(); ++i) a[i] = diff(t[i]);
        return deviation_d2(a, z, t, 2000.0).d_squared;
    };
    EXPECT_LT(std::abs(d2(coarse) - d2(fine)) / d2(fine), 0.01);
}

TEST(Deviation, Rejections) {
    const auto t = uniform_grid(0.0, 10.0, 1.0);
    const std::vector<double> y(t.size(), 0.0), shorter(t.size() - 1, 0.0);
    EXPECT_THROW(deviation_d2(y, shorter, t, 5.0), ValidationError);
    EXPECT_THROW(deviation_d2(y, y, t, 11.0), ValidationError);
    EXPECT_THROW(deviation_d2(y, y, t, 0.0), ValidationError);
    const auto shifted = uniform_grid(1.0, 11.0, 1.0);
    EXPECT_THROW(deviation_d2(y, y, shifted, 5.0), ValidationError);
    std::vector<double> uneven(t);
    uneven[3] += 0.1;
    EXPECT_THROW(deviation_d2(y, y, uneven, 5.0), ValidationError);
}

TEST(Histogram, Examples) {
    const std::vector<double> v = {0.01, 0.011, 0.03};
    const auto bins = histogram(v, 0.02);
    ASSERT_EQ(bins.size(), 2u);
    EXPECT_EQ(bins[0].lo, 0.0);
    EXPECT_EQ(bins[0].count, 2u);
    EXPECT_EQ(bins[1].count, 1u);
    EXPECT_EQ(mode(bins).count, 2u);

    const std::vector<double> one = {0.017};
    const auto single = histogram(one, 0.005);
    std::size_t total = 0;
    for (const auto& b : single) total += b.count;
    EXPECT_EQ(total, 1u);
    EXPECT_EQ(single.back().count, 1u);

    EXPECT_TRUE(histogram(std::vector<double>{}, 0.1).empty());
    EXPECT_THROW(histogram(v, 0.0), ValidationError);
    // Left-closed: an edge value lands in the upper bin.
    EXPECT_EQ(histogram(std::vector<double>{0.5}, 0.25).back().lo, 0.5);
}

TEST(Median, OddEven) {
    EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
    EXPECT_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
    EXPECT_THROW(median({}), ValidationError);
}

TEST(Scaling, PlantedPowerLaws) {
    std::vector<ScalingPoint> inv, flat, steep;
    for (double n : {10.0, 25.0, 50.0, 100.0, 200.0, 400.0, 500.0, 800.0}) {
        inv.push_back({n, 0.37 / n});
        flat.push_back({n, 0.01});
        steep.push_back({n, 5.0 * std::pow(n, -2.5)});
    }
    EXPECT_NEAR(scaling_fit(inv).slope, -1.0, 1e-9);
    EXPECT_NEAR(scaling_fit(inv).intercept, std::log(0.37), 1e-9);
    EXPECT_NEAR(scaling_fit(inv).residual, 0.0, 1e-9);
    EXPECT_NEAR(scaling_fit(flat).slope, 0.0, 1e-9);
    EXPECT_NEAR(scaling_fit(steep).slope, -2.5, 1e-9);
}

TEST(Scaling, Rejections) {
    const std::vector<ScalingPoint> two = {{10, 0.1}, {20, 0.05}};
    EXPECT_THROW(scaling_fit(two), ValidationError);
    const std::vector<ScalingPoint> same = {{10, 0.1}, {10, 0.05}, {10, 0.01}};
    EXPECT_THROW(scaling_fit(same), ValidationError);
    // Zero D^2 is dropped, leaving too few points.
    const std::vector<ScalingPoint> zeros = {{10, 0.1}, {20, 0.0}, {30, 0.03}};
    EXPECT_THROW(scaling_fit(zeros), ValidationError);
}

TEST(Fits, LogLinearRecoversRate) {
    const auto t = uniform_grid(0.0, 2000.0, 1.0);
    const auto y = sample(t, [](double x) { return 0.25 * std::exp(-1.5e-3 * x); });
    EXPECT_NEAR(log_linear_rate(t, y), 1.5e-3, 1e-12);
}

TEST(Fits, DecayFitRecoversRateAndAmplitude) {
    const auto t = uniform_grid(0.0, 2000.0, 1.0);
    const auto y = sample(t, [](double x) { return 0.25 * std::exp(-1.5708e-3 * x); });
    const auto f = fit_exponential_decay(t, y);
    EXPECT_NEAR(f.rate, 1.5708e-3, 1e-9);
    EXPECT_NEAR(f.amplitude, 0.25, 1e-9);
}

TEST(Fits, SingleExponentialIsExactOnExponential) {
    const auto t = uniform_grid(0.0, 2000.0, 1.0);
    const auto y = sample(t, [](double x) { return 0.5 + 0.5 * std::exp(-3.1416e-3 * x); });
    for (bool anchored : {false, true}) {
        const auto f = fit_single_exponential(t, y, 2000.0, anchored);
        EXPECT_NEAR(f.rate, 3.1416e-3, 1e-8);
        EXPECT_NEAR(f.offset, 0.5, 1e-8);
        EXPECT_NEAR(f.amplitude, 0.5, 1e-8);
        EXPECT_LT(f.deviation.d, 1e-8);
    }
}

TEST(Fits, SingleExponentialCannotFollowOscillation) {
    // A damped oscillation keeps a sizeable residual against every member of the family.
    const auto t = uniform_grid(0.0, 2000.0, 1.0);
    const auto y = sample(t, [](double x) { return 0.5 + 0.5 * std::cos(0.01 * x) * std::exp(-x / 1000.0); });
    const auto f = fit_single_exponential(t, y, 2000.0);
    EXPECT_GT(f.deviation.d, 0.05);
}
