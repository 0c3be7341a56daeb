// random.hpp: Counter-based seeded generator and Box–Muller Gaussians
//
// Every draw is a pure function of (seed, stream, counter), so results do not
// depend on call order, thread scheduling or the standard library's
// distribution implementations.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace finitebath::rng {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Named streams so that the coupling matrix and the initial states never share draws.
enum class Stream : std::uint64_t {
    coupling = 1,
    bath_state = 2,
    lower_component = 3,
    upper_component = 4,
    ensemble_member = 5,
};

class CounterRng {
public:
    constexpr CounterRng(std::uint64_t seed, Stream stream) noexcept
        : key_(mix64(seed ^ mix64(static_cast<std::uint64_t>(stream) * 0x9e3779b97f4a7c15ULL))) {}

    constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
        return mix64(key_ + counter * 0x9e3779b97f4a7c15ULL);
    }

    // Uniform in (0, 1].
    double uniform_open0(std::uint64_t counter) const noexcept {
        return static_cast<double>((bits(counter) >> 11) + 1) * 0x1.0p-53;
    }

    // Uniform in [0, 1).
    double uniform(std::uint64_t counter) const noexcept {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    // One Box–Muller pair, returned as (re, im); both parts are independent N(0, 1).
    std::complex<double> gaussian_pair(std::uint64_t index) const {
        const double u1 = uniform_open0(2 * index);
        const double u2 = uniform(2 * index + 1);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(phi), r * std::sin(phi)};
    }

private:
    std::uint64_t key_;
};

// Derive an independent child seed, e.g. for ensemble member i.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(CounterRng(seed, Stream::ensemble_member).bits(index));
}

inline Eigen::VectorXcd gaussian_vector(std::uint64_t seed, Stream stream, Eigen::Index n) {
    const CounterRng gen(seed, stream);
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = gen.gaussian_pair(static_cast<std::uint64_t>(i));
    return v;
}

// Haar-uniform unit vector: complex Gaussian amplitudes, normalized.
inline Eigen::VectorXcd haar_unit_vector(std::uint64_t seed, Stream stream, Eigen::Index n) {
    Eigen::VectorXcd v = gaussian_vector(seed, stream, n);
    v /= v.norm();
    return v;
}

}  // namespace finitebath::rng
