// model.hpp: Two-level system coupled to a two-band finite bath
//
// Spin levels: |0> at energy 0, |1> at energy delta_e. Lower band levels sit at
// (band_width / n1) * k, k = 1..n1; upper band levels at delta_e + (band_width / n2) * k.
// The interaction lambda * sum C(n1, n2) sigma+ |n1><n2| + h.c. only connects
// |0, n2> with |1, n1>.

#pragma once

#include "finitebath/errors.hpp"
#include "finitebath/random.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace finitebath {

using cplx = std::complex<double>;

struct ModelParams {
    double delta_e{25.0};      // spin splitting = band separation
    double band_width{0.5};    // width of each band
    std::size_t n1{500};       // lower-band levels
    std::size_t n2{500};       // upper-band levels
    double lambda{5e-4};       // coupling strength
    std::uint64_t seed_coupling{1};

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Reference parameter set: delta_e = 25, band_width = 0.5, N1 = N2 = 500, lambda = 5e-4.
inline ModelParams paper_params() { return ModelParams{}; }

inline void validate(const ModelParams& p) {
    std::ostringstream why;
    if (p.n1 < 1) why << "n1 must be >= 1; ";
    if (p.n2 < 1) why << "n2 must be >= 1; ";
    if (!(p.delta_e > 0.0) || !std::isfinite(p.delta_e)) why << "delta_e must be > 0; ";
    if (!(p.lambda >= 0.0) || !std::isfinite(p.lambda)) why << "lambda must be >= 0; ";
    if (!(p.band_width >= 0.0) || !std::isfinite(p.band_width)) why << "band_width must be >= 0; ";
    else if (p.delta_e > 0.0 && !(p.band_width < p.delta_e))
        why << "band_width must be < delta_e (bands would overlap); ";
    const std::string msg = why.str();
    if (!msg.empty()) throw ValidationError("invalid model parameters: " + msg.substr(0, msg.size() - 2));
}

struct CouplingMatrix {
    Eigen::MatrixXcd entries;  // n1 x n2

    // sum |C|^2 / (n1 n2)
    double mean_square() const {
        return entries.squaredNorm() / static_cast<double>(entries.rows() * entries.cols());
    }
};

// i.i.d. Gaussian real and imaginary parts, then rescaled to unit mean square.
inline CouplingMatrix sample_coupling(std::size_t n1, std::size_t n2, std::uint64_t seed) {
    const rng::CounterRng gen(seed, rng::Stream::coupling);
    CouplingMatrix c;
    c.entries.resize(static_cast<Eigen::Index>(n1), static_cast<Eigen::Index>(n2));
    std::uint64_t k = 0;
    for (Eigen::Index i = 0; i < c.entries.rows(); ++i)
        for (Eigen::Index j = 0; j < c.entries.cols(); ++j) c.entries(i, j) = gen.gaussian_pair(k++);
    c.entries *= 1.0 / std::sqrt(c.mean_square());
    return c;
}

class FiniteBathModel {
public:
    explicit FiniteBathModel(const ModelParams& params) : params_(params) {
        validate(params_);
        lower_.resize(params_.n1);
        upper_.resize(params_.n2);
        const double s1 = params_.band_width / static_cast<double>(params_.n1);
        const double s2 = params_.band_width / static_cast<double>(params_.n2);
        for (std::size_t k = 0; k < params_.n1; ++k) lower_[k] = s1 * static_cast<double>(k + 1);
        for (std::size_t k = 0; k < params_.n2; ++k)
            upper_[k] = params_.delta_e + s2 * static_cast<double>(k + 1);
        coupling_ = sample_coupling(params_.n1, params_.n2, params_.seed_coupling);
    }

    const ModelParams& params() const noexcept { return params_; }
    const std::vector<double>& lower_levels() const noexcept { return lower_; }
    const std::vector<double>& upper_levels() const noexcept { return upper_; }
    const CouplingMatrix& coupling() const noexcept { return coupling_; }

    std::size_t n1() const noexcept { return params_.n1; }
    std::size_t n2() const noexcept { return params_.n2; }
    double spin_gap() const noexcept { return params_.delta_e; }

private:
    ModelParams params_;
    std::vector<double> lower_;
    std::vector<double> upper_;
    CouplingMatrix coupling_;
};

inline FiniteBathModel build_model(const ModelParams& params) { return FiniteBathModel(params); }

// ----------------------------- Validity conditions ---------------------------

struct ConditionReport {
    double criterion_one{0.0};   // 2 lambda N / band_width, needs >= 1
    double criterion_two{0.0};   // lambda^2 N / band_width^2, needs << 1
    std::size_t n_used{0};       // max(n1, n2)
    double tau_c_estimate{0.0};  // 1 / band_width
    double tau_r_estimate{0.0};  // 1 / R01
    bool pass{false};
    std::vector<std::string> reasons;  // why pass is false
};

// Threshold for "much smaller than one".
inline constexpr double kCriterionTwoMax = 0.01;

inline ConditionReport check_conditions(const ModelParams& p) {
    validate(p);
    constexpr double inf = std::numeric_limits<double>::infinity();
    ConditionReport r;
    r.n_used = std::max(p.n1, p.n2);
    const double n = static_cast<double>(r.n_used);
    if (p.band_width > 0.0) {
        r.criterion_one = 2.0 * p.lambda * n / p.band_width;
        r.criterion_two = p.lambda * p.lambda * n / (p.band_width * p.band_width);
        r.tau_c_estimate = 1.0 / p.band_width;
        const double r01 = 2.0 * std::numbers::pi * p.lambda * p.lambda * static_cast<double>(p.n2) / p.band_width;
        r.tau_r_estimate = r01 > 0.0 ? 1.0 / r01 : inf;
    } else {
        r.criterion_one = p.lambda > 0.0 ? inf : 0.0;
        r.criterion_two = inf;
        r.tau_c_estimate = inf;
        r.tau_r_estimate = 0.0;
    }
    if (!(r.criterion_one >= 1.0)) r.reasons.emplace_back("2*lambda*N/band_width < 1 (coupling too weak for the level density)");
    if (!(r.criterion_two <= kCriterionTwoMax)) {
        r.reasons.emplace_back(p.band_width > 0.0 ? "lambda^2*N/band_width^2 not << 1 (bath correlations too slow)"
                                                  : "band_width = 0: lambda^2*N/band_width^2 diverges (non-Markovian)");
    }
    r.pass = r.reasons.empty();
    return r;
}

// ----------------------------- Homogeneity diagnostic ------------------------

// Sliding-window tallies of width `interval` across each band. A ratio is
// max/min over window positions; nullopt when the band is degenerate
// (a single level or zero width) so that no meaningful ratio exists.
struct HomogeneityReport {
    double interval{0.0};
    std::vector<std::size_t> lower_counts;   // per window position
    std::vector<std::size_t> upper_counts;
    std::optional<double> lower_count_ratio;
    std::optional<double> upper_count_ratio;
    // Windowed sum of |C|^2 over all sources in the opposite band.
    std::optional<double> lower_to_upper_weight_ratio;
    std::optional<double> upper_to_lower_weight_ratio;
    // Worst max/min over individual source states.
    std::optional<double> lower_to_upper_worst_source_ratio;
    std::optional<double> upper_to_lower_worst_source_ratio;
    bool degenerate{false};
};

namespace detail {

// Index ranges [first, last) of levels inside each window (lo, lo + I], lo stepping one level at a time.
inline std::vector<std::pair<std::size_t, std::size_t>> windows(const std::vector<double>& levels, double origin,
                                                                 double width, double interval) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    const std::size_t n = levels.size();
    const double spacing = width / static_cast<double>(n);
    const double eps = 1e-9 * spacing;
    for (std::size_t j = 0;; ++j) {
        const double lo = origin + spacing * static_cast<double>(j);
        const double hi = lo + interval;
        if (hi > origin + width + eps) break;
        const auto first = std::upper_bound(levels.begin(), levels.end(), lo + eps) - levels.begin();
        const auto last = std::upper_bound(levels.begin(), levels.end(), hi + eps) - levels.begin();
        out.emplace_back(static_cast<std::size_t>(first), static_cast<std::size_t>(last));
    }
    return out;
}

inline std::optional<double> ratio(double mx, double mn) {
    if (!(mn > 0.0)) return std::nullopt;
    return mx / mn;
}

}  // namespace detail

inline HomogeneityReport homogeneity_diagnostic(const FiniteBathModel& model, double interval) {
    const auto& p = model.params();
    if (!(interval > 0.0) || interval > p.band_width * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "homogeneity_diagnostic: interval " << interval << " must satisfy 0 < interval <= band_width ("
            << p.band_width << ")";
        throw ValidationError(msg.str());
    }
    HomogeneityReport rep;
    rep.interval = interval;
    if (p.n1 < 2 || p.n2 < 2) {
        rep.degenerate = true;
        return rep;
    }
    const auto wl = detail::windows(model.lower_levels(), 0.0, p.band_width, interval);
    const auto wu = detail::windows(model.upper_levels(), p.delta_e, p.band_width, interval);
    for (auto [a, b] : wl) rep.lower_counts.push_back(b - a);
    for (auto [a, b] : wu) rep.upper_counts.push_back(b - a);
    auto count_ratio = [](const std::vector<std::size_t>& c) {
        const auto [mn, mx] = std::minmax_element(c.begin(), c.end());
        return detail::ratio(static_cast<double>(*mx), static_cast<double>(*mn));
    };
    rep.lower_count_ratio = count_ratio(rep.lower_counts);
    rep.upper_count_ratio = count_ratio(rep.upper_counts);

    const Eigen::MatrixXd w = model.coupling().entries.cwiseAbs2();  // n1 x n2
    // Windows over `targets` for every source row of `weights`.
    auto weight_ratios = [](const Eigen::MatrixXd& weights, const std::vector<std::pair<std::size_t, std::size_t>>& win,
                            std::optional<double>& aggregate, std::optional<double>& worst) {
        const Eigen::VectorXd col_sum = weights.colwise().sum().transpose();
        double amx = 0.0, amn = std::numeric_limits<double>::infinity();
        double worst_ratio = 1.0;
        bool worst_defined = true;
        for (auto [a, b] : win) {
            const double s = col_sum.segment(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b - a)).sum();
            amx = std::max(amx, s);
            amn = std::min(amn, s);
        }
        aggregate = detail::ratio(amx, amn);
        for (Eigen::Index src = 0; src < weights.rows(); ++src) {
            double mx = 0.0, mn = std::numeric_limits<double>::infinity();
            for (auto [a, b] : win) {
                const double s =
                    weights.row(src).segment(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b - a)).sum();
                mx = std::max(mx, s);
                mn = std::min(mn, s);
            }
            const auto r = detail::ratio(mx, mn);
            if (!r) worst_defined = false;
            else worst_ratio = std::max(worst_ratio, *r);
        }
        worst = worst_defined ? std::optional<double>(worst_ratio) : std::nullopt;
    };
    weight_ratios(w, wu, rep.lower_to_upper_weight_ratio, rep.lower_to_upper_worst_source_ratio);
    weight_ratios(w.transpose(), wl, rep.upper_to_lower_weight_ratio, rep.upper_to_lower_worst_source_ratio);
    return rep;
}

}  // namespace finitebath
