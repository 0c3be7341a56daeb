// metrics.hpp: Deviation between exact and predicted populations, histograms, fits

#pragma once

#include "finitebath/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <vector>

namespace finitebath::metrics {

struct DeviationReport {
    double d_squared{0.0};
    double d{0.0};
    double tau{0.0};
    std::size_t n_samples{0};  // grid points used, including an interpolated endpoint
    double grid_step{0.0};
};

namespace detail {

inline double check_uniform(std::span<const double> t) {
    if (t.size() < 2) throw ValidationError("deviation: need at least two grid points");
    const double step = t[1] - t[0];
    if (!(step > 0.0)) throw ValidationError("deviation: time grid must be increasing");
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (std::abs((t[i] - t[i - 1]) - step) > 1e-9 * std::max(1.0, std::abs(t[i])))
            throw ValidationError("deviation: time grid must be uniform");
    }
    return step;
}

}  // namespace detail

// (1/tau) * integral_0^tau (a - b)^2 dt by the trapezoidal rule. The grid must
// start at 0; a final partial interval is handled by linear interpolation.
inline DeviationReport deviation_d2(std::span<const double> a, std::span<const double> b, std::span<const double> t,
                                    double tau) {
    if (a.size() != t.size() || b.size() != t.size()) {
        std::ostringstream msg;
        msg << "deviation: series lengths " << a.size() << ", " << b.size() << " do not match grid length " << t.size();
        throw ValidationError(msg.str());
    }
    const double step = detail::check_uniform(t);
    if (std::abs(t.front()) > 1e-12 * step) throw ValidationError("deviation: time grid must start at t = 0");
    if (!(tau > 0.0) || tau > t.back() + 1e-9 * step) {
        std::ostringstream msg;
        msg << "deviation: tau = " << tau << " outside (0, " << t.back() << "]";
        throw ValidationError(msg.str());
    }
    auto sq = [&](std::size_t i) {
        const double d = a[i] - b[i];
        return d * d;
    };
    double integral = 0.0;
    std::size_t i = 0;
    std::size_t used = 1;
    while (i + 1 < t.size() && t[i + 1] <= tau + 1e-9 * step) {
        integral += 0.5 * (t[i + 1] - t[i]) * (sq(i) + sq(i + 1));
        ++i;
        ++used;
    }
    const double rest = tau - t[i];
    if (rest > 1e-9 * step && i + 1 < t.size()) {
        const double w = rest / (t[i + 1] - t[i]);
        const double d_end = (1.0 - w) * (a[i] - b[i]) + w * (a[i + 1] - b[i + 1]);
        integral += 0.5 * rest * (sq(i) + d_end * d_end);
        ++used;
    }
    DeviationReport r;
    r.tau = tau;
    r.d_squared = integral / tau;
    r.d = std::sqrt(r.d_squared);
    r.n_samples = used;
    r.grid_step = step;
    return r;
}

// ----------------------------- Histogram -------------------------------------

struct Bin {
    double lo{0.0};
    double hi{0.0};
    std::size_t count{0};
};

// Left-closed bins [k w, (k+1) w) starting at 0, up to the bin holding the largest value.
inline std::vector<Bin> histogram(std::span<const double> values, double bin_width) {
    if (!(bin_width > 0.0)) throw ValidationError("histogram: bin width must be > 0");
    std::vector<Bin> bins;
    if (values.empty()) return bins;
    std::vector<std::size_t> idx(values.size());
    std::size_t top = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= 0.0) || !std::isfinite(values[i]))
            throw ValidationError("histogram: values must be finite and >= 0");
        idx[i] = static_cast<std::size_t>(std::floor(values[i] / bin_width));
        top = std::max(top, idx[i]);
    }
    bins.resize(top + 1);
    for (std::size_t k = 0; k <= top; ++k) {
        bins[k].lo = bin_width * static_cast<double>(k);
        bins[k].hi = bin_width * static_cast<double>(k + 1);
    }
    for (std::size_t k : idx) ++bins[k].count;
    return bins;
}

// Bin with the largest count (first one on ties).
inline const Bin& mode(const std::vector<Bin>& bins) {
    if (bins.empty()) throw ValidationError("mode: empty histogram");
    return *std::max_element(bins.begin(), bins.end(), [](const Bin& x, const Bin& y) { return x.count < y.count; });
}

inline double median(std::vector<double> v) {
    if (v.empty()) throw ValidationError("median: empty input");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ----------------------------- Fits ------------------------------------------

struct LineFit {
    double slope{0.0};
    double intercept{0.0};
    double rms_residual{0.0};
};

inline LineFit least_squares_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ValidationError("least_squares_line: need >= 2 paired points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw ValidationError("least_squares_line: abscissae are all equal");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    f.rms_residual = std::sqrt(ss / n);
    return f;
}

struct ScalingPoint {
    double n{0.0};
    double d_squared{0.0};
};

struct ScalingFit {
    std::vector<ScalingPoint> points;  // points entering the fit
    double slope{0.0};                 // d ln D^2 / d ln N
    double intercept{0.0};
    double residual{0.0};              // RMS in ln D^2
};

// Ordinary least squares on (ln N, ln D^2), using only points with D^2 > 0.
inline ScalingFit scaling_fit(std::span<const ScalingPoint> points) {
    ScalingFit fit;
    std::vector<double> x, y;
    for (const auto& p : points) {
        if (!(p.n >= 1.0)) throw ValidationError("scaling_fit: N must be >= 1");
        if (p.d_squared > 0.0 && std::isfinite(p.d_squared)) {
            fit.points.push_back(p);
            x.push_back(std::log(p.n));
            y.push_back(std::log(p.d_squared));
        }
    }
    if (fit.points.size() < 3) throw ValidationError("scaling_fit: need at least 3 points with D^2 > 0");
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); }))
        throw ValidationError("scaling_fit: degenerate input, all N are equal");
    const auto line = least_squares_line(x, y);
    fit.slope = line.slope;
    fit.intercept = line.intercept;
    fit.residual = line.rms_residual;
    return fit;
}

// Decay rate of a positive series from a straight-line fit of its logarithm.
inline double log_linear_rate(std::span<const double> t, std::span<const double> y) {
    std::vector<double> ly(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!(y[i] > 0.0)) throw ValidationError("log_linear_rate: series must be positive");
        ly[i] = std::log(y[i]);
    }
    return -least_squares_line(t, ly).slope;
}

struct DecayFit {
    double amplitude{0.0};
    double rate{0.0};
};

// Least squares of A exp(-gamma t) against y in linear space (A free). For a
// given gamma the best A is closed form, so only gamma is searched.
inline DecayFit fit_exponential_decay(std::span<const double> t, std::span<const double> y) {
    if (t.size() != y.size() || t.size() < 3) throw ValidationError("fit_exponential_decay: need >= 3 paired points");
    auto objective = [&](double gamma, double& amp) {
        double sey = 0.0, see = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double e = std::exp(-gamma * (t[i] - t[0]));
            sey += e * y[i];
            see += e * e;
        }
        amp = sey / see;
        double s = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double d = y[i] - amp * std::exp(-gamma * (t[i] - t[0]));
            s += d * d;
        }
        return s;
    };
    const double span = t.back() - t.front();
    if (!(span > 0.0)) throw ValidationError("fit_exponential_decay: time span must be positive");
    // Bracket on a log grid, then golden-section in log(gamma).
    const double g_lo = 1e-4 / span, g_hi = 1e3 / span;
    constexpr int kScan = 300;
    double amp = 0.0, best = std::numeric_limits<double>::infinity();
    int best_k = 0;
    for (int k = 0; k <= kScan; ++k) {
        const double g = g_lo * std::pow(g_hi / g_lo, static_cast<double>(k) / kScan);
        const double obj = objective(g, amp);
        if (obj < best) {
            best = obj;
            best_k = k;
        }
    }
    const double lg = std::log(g_hi / g_lo) / kScan;
    double lo = std::log(g_lo) + lg * (best_k - 1), hi = std::log(g_lo) + lg * (best_k + 1);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 100; ++it) {
        const double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
        if (objective(std::exp(c), amp) < objective(std::exp(d), amp)) hi = d;
        else lo = c;
    }
    DecayFit fit;
    fit.rate = std::exp(0.5 * (lo + hi));
    objective(fit.rate, fit.amplitude);
    return fit;
}

struct ExponentialFit {
    double offset{0.0};     // a
    double amplitude{0.0};  // b
    double rate{0.0};       // gamma >= 0
    DeviationReport deviation;
};

// Best a + b exp(-gamma t) in the D^2 sense over [0, tau]. For fixed gamma the
// optimal (a, b) is a 2x2 linear least-squares problem; gamma is scanned on a
// logarithmic grid and then refined by golden-section search. With `anchored`
// the curve is pinned to the initial value, a + b = y(0), i.e. the family of
// single-rate relaxations out of the actual initial condition.
inline ExponentialFit fit_single_exponential(std::span<const double> t, std::span<const double> y, double tau,
                                             bool anchored = false) {
    const double step = detail::check_uniform(t);
    std::vector<double> tw, yw;
    for (std::size_t i = 0; i < t.size() && t[i] <= tau + 1e-9 * step; ++i) {
        tw.push_back(t[i]);
        yw.push_back(y[i]);
    }
    if (tw.size() < 3) throw ValidationError("fit_single_exponential: window holds fewer than 3 samples");
    // Trapezoid weights so the objective matches deviation_d2.
    std::vector<double> w(tw.size(), step);
    w.front() = w.back() = 0.5 * step;

    const double y0 = yw.front();
    auto solve = [&](double gamma, double& a, double& b) {
        if (anchored) {
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < tw.size(); ++i) {
                const double e = std::exp(-gamma * tw[i]);
                num += w[i] * (yw[i] - y0 * e) * (1.0 - e);
                den += w[i] * (1.0 - e) * (1.0 - e);
            }
            a = den > 0.0 ? num / den : y0;
            b = y0 - a;
            double obj = 0.0;
            for (std::size_t i = 0; i < tw.size(); ++i) {
                const double d = yw[i] - a - b * std::exp(-gamma * tw[i]);
                obj += w[i] * d * d;
            }
            return obj;
        }
        double s11 = 0, s12 = 0, s22 = 0, r1 = 0, r2 = 0;
        for (std::size_t i = 0; i < tw.size(); ++i) {
            const double e = std::exp(-gamma * tw[i]);
            s11 += w[i];
            s12 += w[i] * e;
            s22 += w[i] * e * e;
            r1 += w[i] * yw[i];
            r2 += w[i] * yw[i] * e;
        }
        const double det = s11 * s22 - s12 * s12;
        if (std::abs(det) < 1e-14 * s11 * s22) {
            a = r1 / s11;  // exponential indistinguishable from a constant
            b = 0.0;
        } else {
            a = (r1 * s22 - r2 * s12) / det;
            b = (s11 * r2 - s12 * r1) / det;
        }
        double obj = 0.0;
        for (std::size_t i = 0; i < tw.size(); ++i) {
            const double d = yw[i] - a - b * std::exp(-gamma * tw[i]);
            obj += w[i] * d * d;
        }
        return obj;
    };

    const double span = tw.back() - tw.front();
    const double g_lo = 1e-3 / span, g_hi = 10.0 / step;
    double best_g = g_lo, best = std::numeric_limits<double>::infinity(), a = 0, b = 0;
    constexpr int kScan = 400;
    for (int k = 0; k <= kScan; ++k) {
        const double g = g_lo * std::pow(g_hi / g_lo, static_cast<double>(k) / kScan);
        const double obj = solve(g, a, b);
        if (obj < best) {
            best = obj;
            best_g = g;
        }
    }
    const double ratio = std::pow(g_hi / g_lo, 1.0 / kScan);
    double lo = std::log(best_g / ratio), hi = std::log(best_g * ratio);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 100; ++it) {
        const double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
        if (solve(std::exp(c), a, b) < solve(std::exp(d), a, b)) hi = d;
        else lo = c;
    }
    ExponentialFit fit;
    fit.rate = std::exp(0.5 * (lo + hi));
    solve(fit.rate, fit.offset, fit.amplitude);
    std::vector<double> model(tw.size());
    for (std::size_t i = 0; i < tw.size(); ++i) model[i] = fit.offset + fit.amplitude * std::exp(-fit.rate * tw[i]);
    fit.deviation = deviation_d2(yw, model, tw, tau);
    return fit;
}

}  // namespace finitebath::metrics
