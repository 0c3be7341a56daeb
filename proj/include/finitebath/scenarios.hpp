// scenarios.hpp: The six run modes: evolve, ensemble, sweep, kernel, reverse, check
//
// Each scenario returns plain data (series + a JSON report). Nothing here
// touches the filesystem; see output.hpp.

#pragma once

#include "finitebath/config.hpp"
#include "finitebath/errors.hpp"
#include "finitebath/ham.hpp"
#include "finitebath/metrics.hpp"
#include "finitebath/model.hpp"
#include "finitebath/observables.hpp"
#include "finitebath/propagator.hpp"
#include "finitebath/random.hpp"
#include "finitebath/state.hpp"
#include "finitebath/version.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace finitebath {

// One CSV worth of trajectory data. HAM columns hold NaN where the scheme is undefined.
struct SeriesOutput {
    std::string file;
    Trajectory exact;
    std::vector<double> rho11_ham;
    std::vector<double> coherence_ham;
};

struct KernelOutput {
    std::string file;
    std::vector<double> t;
    std::vector<cplx> f;
};

// Generic table (per-member or per-N summaries). Cells are preformatted.
struct TableOutput {
    std::string file;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

struct ScenarioResult {
    RunConfig config;
    std::vector<SeriesOutput> series;
    std::optional<KernelOutput> kernel;
    std::vector<TableOutput> tables;
    nlohmann::json report;
};

// ----------------------------- Parallel map ----------------------------------

// Runs f(i) for i in [0, n) on `workers` threads. Results come back in index
// order. If any task throws, the exception of the lowest failing index is rethrown.
template <typename F>
auto parallel_map(std::size_t n, std::size_t workers, F&& f) -> std::vector<decltype(f(std::size_t{}))> {
    using R = decltype(f(std::size_t{}));
    std::vector<std::optional<R>> slots(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                slots[i].emplace(f(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<R> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

// ----------------------------- Helpers ---------------------------------------

namespace detail {

// JSON has no infinities; non-finite values are written as strings.
inline nlohmann::json num(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

inline nlohmann::json opt_num(const std::optional<double>& x) { return x ? num(*x) : nlohmann::json(nullptr); }

// Mean of y over lo <= t <= hi.
inline double window_mean(std::span<const double> t, std::span<const double> y, double lo, double hi) {
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= lo - 1e-9 && t[i] <= hi + 1e-9) {
            s += y[i];
            ++n;
        }
    }
    return n ? s / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

inline std::string cell(double x) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return ec == std::errc{} ? std::string(buf, p) : std::string("nan");
}

template <typename Int>
inline std::string cell_int(Int x) {
    return std::to_string(x);
}

// Prefix an error with the model size and seeds it came from, keeping its type.
template <typename F>
auto with_context(const std::string& where, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ValidationError& e) {
        throw ValidationError(where + ": " + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(where + ": " + e.what());
    }
}

inline std::string context(const ModelParams& p, std::uint64_t state_seed) {
    return "n1=" + std::to_string(p.n1) + " n2=" + std::to_string(p.n2) + " coupling seed " +
           std::to_string(p.seed_coupling) + " state seed " + std::to_string(state_seed);
}

}  // namespace detail

inline nlohmann::json to_json(const ConditionReport& c) {
    return {{"criterion_one", detail::num(c.criterion_one)},
            {"criterion_two", detail::num(c.criterion_two)},
            {"criterion_two_max", kCriterionTwoMax},
            {"n_used", c.n_used},
            {"tau_c_estimate", detail::num(c.tau_c_estimate)},
            {"tau_r_estimate", detail::num(c.tau_r_estimate)},
            {"pass", c.pass},
            {"reasons", c.reasons}};
}

inline nlohmann::json to_json(const HomogeneityReport& h) {
    return {{"interval", h.interval},
            {"degenerate", h.degenerate},
            {"lower_count_ratio", detail::opt_num(h.lower_count_ratio)},
            {"upper_count_ratio", detail::opt_num(h.upper_count_ratio)},
            {"lower_to_upper_weight_ratio", detail::opt_num(h.lower_to_upper_weight_ratio)},
            {"upper_to_lower_weight_ratio", detail::opt_num(h.upper_to_lower_weight_ratio)},
            {"lower_to_upper_worst_source_ratio", detail::opt_num(h.lower_to_upper_worst_source_ratio)},
            {"upper_to_lower_worst_source_ratio", detail::opt_num(h.upper_to_lower_worst_source_ratio)}};
}

inline nlohmann::json to_json(const KernelTimescales& k) {
    return {{"half_width", detail::num(k.half_width)},
            {"e_fold_width", detail::num(k.e_fold_width)},
            {"first_minimum", detail::num(k.first_minimum)},
            {"recurrence_period", detail::num(k.recurrence_period)},
            {"recurrence_value", detail::num(k.recurrence_value)}};
}

inline nlohmann::json to_json(const metrics::DeviationReport& d) {
    return {{"d_squared", d.d_squared}, {"d", d.d}, {"tau", d.tau}, {"n_samples", d.n_samples}, {"grid_step", d.grid_step}};
}

inline PureState make_initial_state(const FiniteBathModel& m, const InitialStateConfig& init) {
    switch (init.kind) {
        case InitialKind::excited: return initial_state_excited(m, init.seed);
        case InitialKind::superposition: return initial_state_superposition(m, init.seed);
        case InitialKind::subspace_random: return initial_state_subspace_random(m, init.p_excited, init.seed);
    }
    throw ValidationError("unknown initial state kind");
}

// HAM overlay for a trajectory that starts at tr.t[0] == 0 (or is mirrored, see reverse).
struct HamOverlay {
    bool defined{false};
    ham::Rates rates{};
    double rho11_0{0.0};
    double p_c0{0.0};
    std::vector<double> rho11;          // p_c0 = coupled weight
    std::vector<double> rho11_literal;  // p_c0 = rho11(0)
    std::vector<double> coherence;
};

inline HamOverlay ham_overlay(const ModelParams& p, const ReducedState& rho0, double p_c0,
                              std::span<const double> t_eval) {
    HamOverlay h;
    h.rho11_0 = rho0.rho11;
    h.p_c0 = p_c0;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (!(p.band_width > 0.0)) {
        h.rho11.assign(t_eval.size(), nan);
        h.rho11_literal.assign(t_eval.size(), nan);
        h.coherence.assign(t_eval.size(), nan);
        return h;
    }
    h.defined = true;
    h.rates = ham::rates(p);
    h.rho11 = ham::predict_rho11(h.rates, rho0.rho11, p_c0, t_eval);
    h.rho11_literal = ham::predict_rho11(h.rates, rho0.rho11, t_eval);
    const auto r01 = ham::predict_rho01(h.rates, rho0.rho01, p.delta_e, t_eval);
    h.coherence.resize(r01.size());
    for (std::size_t i = 0; i < r01.size(); ++i) h.coherence[i] = std::norm(r01[i]);
    return h;
}

inline nlohmann::json provenance(const RunConfig& c) {
    return {{"code", "finitebath"}, {"version", kVersion}, {"config", to_json(c)}};
}

inline nlohmann::json rates_json(const ModelParams& p) {
    if (!(p.band_width > 0.0)) return {{"defined", false}};
    const auto r = ham::rates(p);
    return {{"defined", true}, {"r01", r.r01}, {"r10", r.r10}, {"total", r.total()}};
}

// ----------------------------- evolve ----------------------------------------

struct EvolveRun {
    SeriesOutput series;
    nlohmann::json report;
};

// Single trajectory with overlay and all derived numbers. Shared by evolve,
// ensemble member 0 and the sweep points.
inline EvolveRun analyse_evolution(const RunConfig& c, const FiniteBathModel& m, const SpectralPropagator& prop,
                                   const PureState& s0, const std::string& file, bool coherence_fits) {
    const auto& p = m.params();
    const double t_max = effective_t_max(c);
    const auto grid = uniform_grid(0.0, t_max, c.sample_step);
    EvolveRun run;
    run.series.file = file;
    run.series.exact = sample_trajectory(prop, s0, grid);
    const auto& tr = run.series.exact;
    const double p_c0 = tr.p_coupled.front();
    const auto h = ham_overlay(p, tr.rho.front(), p_c0, grid);
    run.series.rho11_ham = h.rho11;
    run.series.coherence_ham = h.coherence;

    const auto rho11 = tr.rho11();
    std::vector<double> ent(tr.size());
    for (std::size_t i = 0; i < tr.size(); ++i) ent[i] = entropy(tr.rho[i]);
    const double lo = t_max - c.equilibrium_window;

    nlohmann::json& r = run.report;
    r["initial"] = {{"rho11", tr.rho.front().rho11},
                    {"abs_rho01_sq", coherence(tr.rho.front())},
                    {"p_coupled", p_c0}};
    r["equilibria"] = {{"window", {lo, t_max}},
                       {"exact", detail::window_mean(grid, rho11, lo, t_max)},
                       {"ba", ham::ba_equilibrium(p.delta_e, c.kt_bath)},
                       {"kt_bath", c.kt_bath}};
    r["equilibria"]["ba_ratio"] = r["equilibria"]["exact"].get<double>() / r["equilibria"]["ba"].get<double>();
    const double ent_mean = detail::window_mean(grid, ent, lo, t_max);
    r["entropy"] = {{"window_mean", ent_mean},
                    {"window_mean_over_ln2", ent_mean / std::log(2.0)},
                    {"final", ent.back()},
                    {"ln2", std::log(2.0)}};
    r["p_coupled"] = {{"min", *std::min_element(tr.p_coupled.begin(), tr.p_coupled.end())},
                      {"max", *std::max_element(tr.p_coupled.begin(), tr.p_coupled.end())}};
    if (h.defined) {
        r["equilibria"]["ham"] = ham::equilibrium_rho11(h.rates, p_c0);
        r["equilibria"]["ham_literal"] = ham::equilibrium_rho11(h.rates, h.rho11_0);
        const auto d = metrics::deviation_d2(rho11, h.rho11, grid, c.tau);
        const auto dl = metrics::deviation_d2(rho11, h.rho11_literal, grid, c.tau);
        r["deviation"] = to_json(d);
        r["deviation_literal"] = to_json(dl);
        r["rates"] = rates_json(p);
    } else {
        r["rates"] = rates_json(p);
    }
    const auto coh = tr.coherence();
    if (coherence_fits && coh.front() > 1e-12) {
        std::vector<double> tw, yw;
        for (std::size_t i = 0; i < grid.size() && grid[i] <= c.tau + 1e-9; ++i) {
            tw.push_back(grid[i]);
            yw.push_back(coh[i]);
        }
        const auto nls = metrics::fit_exponential_decay(tw, yw);
        nlohmann::json fit = {{"window", {0.0, c.tau}},
                              {"rate", nls.rate},
                              {"amplitude", nls.amplitude},
                              {"rate_log_linear", metrics::log_linear_rate(tw, yw)}};
        if (h.defined) {
            fit["r01"] = h.rates.r01;
            fit["rate_over_r01"] = nls.rate / h.rates.r01;
        }
        r["coherence_fit"] = fit;
    }
    return run;
}

inline ScenarioResult run_evolve(const RunConfig& c) {
    ScenarioResult res;
    res.config = c;
    const auto m = build_model(c.model);
    const auto ctx = detail::context(c.model, c.initial.seed);
    auto run = detail::with_context(ctx, [&] {
        const auto prop = build_propagator(m);
        return analyse_evolution(c, m, prop, make_initial_state(m, c.initial), "evolve.csv", true);
    });
    res.report = std::move(run.report);
    res.report["conditions"] = to_json(check_conditions(c.model));
    res.series.push_back(std::move(run.series));
    return res;
}

// ----------------------------- ensemble --------------------------------------

inline ScenarioResult run_ensemble(const RunConfig& c) {
    ScenarioResult res;
    res.config = c;
    const auto m = build_model(c.model);
    const auto prop = detail::with_context(detail::context(c.model, c.initial.seed), [&] { return build_propagator(m); });
    const auto rates = ham::rates(c.model);
    const auto grid = uniform_grid(0.0, c.tau, c.sample_step);

    struct Member {
        std::uint64_t seed;
        double d, d_literal, rho11_0, p_c0, late_mean;
        std::optional<SeriesOutput> series;
    };
    const auto members = parallel_map(c.ensemble_size, c.workers, [&](std::size_t i) {
        const std::uint64_t seed = rng::derive_seed(c.initial.seed, i);
        return detail::with_context(detail::context(c.model, seed) + " (member " + std::to_string(i) + ")", [&] {
            const auto s0 = initial_state_subspace_random(m, c.ensemble_p_excited, seed);
            auto tr = sample_trajectory(prop, s0, grid);
            const auto rho11 = tr.rho11();
            const double p_c0 = tr.p_coupled.front();
            const auto pred = ham::predict_rho11(rates, tr.rho.front().rho11, p_c0, grid);
            const auto lit = ham::predict_rho11(rates, tr.rho.front().rho11, grid);
            Member mem{seed,
                       metrics::deviation_d2(rho11, pred, grid, c.tau).d,
                       metrics::deviation_d2(rho11, lit, grid, c.tau).d,
                       tr.rho.front().rho11,
                       p_c0,
                       detail::window_mean(grid, rho11, c.tau - c.equilibrium_window, c.tau),
                       std::nullopt};
            if (i == 0) {
                const auto h = ham_overlay(c.model, tr.rho.front(), p_c0, grid);
                mem.series = SeriesOutput{"ensemble_member0.csv", std::move(tr), h.rho11, h.coherence};
            }
            return mem;
        });
    });

    std::vector<double> d, dl;
    TableOutput table{"ensemble.csv", {"member", "seed", "rho11_0", "p_coupled", "late_mean", "d", "d_literal"}, {}};
    for (std::size_t i = 0; i < members.size(); ++i) {
        const auto& mem = members[i];
        d.push_back(mem.d);
        dl.push_back(mem.d_literal);
        table.rows.push_back({detail::cell_int(i), detail::cell_int(mem.seed), detail::cell(mem.rho11_0),
                              detail::cell(mem.p_c0), detail::cell(mem.late_mean), detail::cell(mem.d),
                              detail::cell(mem.d_literal)});
    }
    if (members.front().series) res.series.push_back(*members.front().series);
    res.tables.push_back(std::move(table));

    const auto bins = metrics::histogram(d, c.histogram_bin);
    TableOutput hist{"histogram.csv", {"lo", "hi", "count"}, {}};
    nlohmann::json jbins = nlohmann::json::array();
    for (const auto& b : bins) {
        hist.rows.push_back({detail::cell(b.lo), detail::cell(b.hi), detail::cell_int(b.count)});
        jbins.push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}});
    }
    res.tables.push_back(std::move(hist));
    const auto below = static_cast<double>(std::count_if(d.begin(), d.end(), [](double x) { return x <= 0.05; }));
    const auto& mode = metrics::mode(bins);
    auto& r = res.report;
    r["ensemble"] = {{"size", c.ensemble_size},
                     {"p_excited", c.ensemble_p_excited},
                     {"tau", c.tau},
                     {"median_d", metrics::median(d)},
                     {"median_d_literal", metrics::median(dl)},
                     {"fraction_d_le_0_05", below / static_cast<double>(d.size())},
                     {"min_d", *std::min_element(d.begin(), d.end())},
                     {"max_d", *std::max_element(d.begin(), d.end())},
                     {"histogram", {{"bin_width", c.histogram_bin}, {"bins", jbins}, {"mode", {mode.lo, mode.hi}}}}};
    r["rates"] = rates_json(c.model);
    r["equilibria"] = {{"ham", ham::equilibrium_rho11(rates, 1.0)},
                       {"ham_literal", ham::equilibrium_rho11(rates, c.ensemble_p_excited)},
                       {"ba", ham::ba_equilibrium(c.model.delta_e, c.kt_bath)}};
    r["conditions"] = to_json(check_conditions(c.model));
    return res;
}

// ----------------------------- sweep -----------------------------------------

inline ScenarioResult run_sweep(const RunConfig& c) {
    ScenarioResult res;
    res.config = c;
    struct Point {
        ModelParams params;
        EvolveRun run;
    };
    RunConfig pc = c;
    pc.t_max = c.tau;  // only [0, tau] enters D^2
    auto points = parallel_map(c.sweep_n.size(), c.workers, [&](std::size_t i) {
        const auto p = sweep_params(c.model, c.sweep_mode, c.sweep_n[i]);
        return detail::with_context(detail::context(p, c.initial.seed), [&] {
            const auto m = build_model(p);
            const auto prop = build_propagator(m);
            char name[32];
            std::snprintf(name, sizeof name, "sweep_n%04zu.csv", c.sweep_n[i]);
            return Point{p, analyse_evolution(pc, m, prop, initial_state_excited(m, c.initial.seed), name, false)};
        });
    });

    std::vector<metrics::ScalingPoint> sp;
    nlohmann::json jpoints = nlohmann::json::array();
    TableOutput table{"scaling.csv",
                      {"n", "band_width", "d_squared", "d", "criterion_one", "criterion_two", "conditions_pass"},
                      {}};
    for (auto& pt : points) {
        const double d2 = pt.run.report["deviation"]["d_squared"].get<double>();
        const auto cond = check_conditions(pt.params);
        sp.push_back({static_cast<double>(pt.params.n1), d2});
        jpoints.push_back({{"n", pt.params.n1},
                           {"band_width", pt.params.band_width},
                           {"d_squared", d2},
                           {"d", std::sqrt(d2)},
                           {"file", pt.run.series.file},
                           {"conditions", to_json(cond)}});
        table.rows.push_back({detail::cell_int(pt.params.n1), detail::cell(pt.params.band_width), detail::cell(d2),
                              detail::cell(std::sqrt(d2)), detail::cell(cond.criterion_one),
                              detail::cell(cond.criterion_two), cond.pass ? "1" : "0"});
        res.series.push_back(std::move(pt.run.series));
    }
    res.tables.push_back(std::move(table));
    const auto fit = metrics::scaling_fit(sp);
    res.report["scaling"] = {{"mode", std::string(to_string(c.sweep_mode))},
                             {"tau", c.tau},
                             {"points", jpoints},
                             {"slope", fit.slope},
                             {"intercept", fit.intercept},
                             {"residual", fit.residual},
                             {"points_used", fit.points.size()}};
    return res;
}

// ----------------------------- kernel ----------------------------------------

inline ScenarioResult run_kernel(const RunConfig& c) {
    ScenarioResult res;
    res.config = c;
    const auto m = build_model(c.model);
    const double t_max = effective_t_max(c);
    const auto grid = uniform_grid(0.0, t_max, c.sample_step);
    res.kernel = KernelOutput{"kernel.csv", grid, band_kernel(m, grid)};
    const auto ts = band_kernel_timescales(m);

    auto run = detail::with_context(detail::context(c.model, c.initial.seed), [&] {
        const auto prop = build_propagator(m);
        return analyse_evolution(c, m, prop, initial_state_excited(m, c.initial.seed), "kernel_rho11.csv", false);
    });
    const auto& tr = run.series.exact;
    const auto rho11 = tr.rho11();
    const double late_from = std::min(3000.0, t_max);
    double late_max = -1.0, late_at = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] >= late_from && rho11[i] > late_max) {
            late_max = rho11[i];
            late_at = grid[i];
        }
    }
    // |f| on the sampled grid at a few reference times.
    double abs_at_15 = std::numeric_limits<double>::quiet_NaN();
    {
        const double t15[1] = {15.0};
        abs_at_15 = std::abs(band_kernel(m, t15)[0]);
    }
    auto& r = res.report;
    r["kernel"] = to_json(ts);
    r["kernel"]["abs_f_at_15"] = abs_at_15;
    r["kernel"]["tau_c_estimate"] = detail::num(check_conditions(c.model).tau_c_estimate);
    r["rho11_late"] = {{"from", late_from}, {"to", t_max}, {"max", late_max}, {"t_of_max", late_at}};
    r["equilibria"] = run.report["equilibria"];
    r["rates"] = rates_json(c.model);
    r["conditions"] = to_json(check_conditions(c.model));
    res.series.push_back(std::move(run.series));
    return res;
}

// ----------------------------- reverse ---------------------------------------

inline ScenarioResult run_reverse(const RunConfig& c) {
    ScenarioResult res;
    res.config = c;
    const double t_max = effective_t_max(c);
    const auto m = build_model(c.model);
    const auto grid = uniform_grid(-t_max, t_max, c.sample_step);
    const auto s0 = initial_state_excited(m, c.initial.seed);
    auto tr = detail::with_context(detail::context(c.model, c.initial.seed), [&] {
        return sample_trajectory(build_propagator(m), s0, grid);
    });
    std::vector<double> abs_t(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) abs_t[i] = std::abs(grid[i]);
    const auto rho0 = reduce(s0);
    const auto h = ham_overlay(c.model, rho0, coupled_probability(s0), abs_t);
    const auto rho11 = tr.rho11();
    const double w = c.equilibrium_window;

    // rho11(-t) against rho11(t) on the mirrored grid.
    double asym = 0.0;
    const std::size_t mid = grid.size() / 2;
    for (std::size_t k = 0; k <= mid; ++k) asym = std::max(asym, std::abs(rho11[mid - k] - rho11[mid + k]));

    auto& r = res.report;
    r["reverse"] = {{"t_max", t_max},
                    {"backward_mean", detail::window_mean(grid, rho11, -t_max, -t_max + w)},
                    {"forward_mean", detail::window_mean(grid, rho11, t_max - w, t_max)},
                    {"window", w},
                    {"max_abs_asymmetry", asym}};
    r["rates"] = rates_json(c.model);
    r["equilibria"] = {{"ham", h.defined ? ham::equilibrium_rho11(h.rates, h.p_c0) : std::nan("")},
                       {"ba", ham::ba_equilibrium(c.model.delta_e, c.kt_bath)}};
    r["conditions"] = to_json(check_conditions(c.model));
    res.series.push_back({"reverse.csv", std::move(tr), h.rho11, h.coherence});

    if (c.degenerate.enabled) {
        ModelParams dp = c.model;
        dp.band_width = c.degenerate.band_width;
        dp.lambda = c.degenerate.lambda;
        const auto dm = build_model(dp);
        const double dt_max = std::max(c.tau, t_max);
        const auto dgrid = uniform_grid(0.0, dt_max, c.sample_step);
        const auto ds0 = initial_state_excited(dm, c.initial.seed);
        auto dtr = detail::with_context("degenerate variant " + detail::context(dp, c.initial.seed), [&] {
            return sample_trajectory(build_propagator(dm), ds0, dgrid);
        });
        const auto drho = dtr.rho11();
        const auto free_fit = metrics::fit_single_exponential(dgrid, drho, c.tau);
        const auto anchored = metrics::fit_single_exponential(dgrid, drho, c.tau, true);
        const auto dh = ham_overlay(dp, reduce(ds0), coupled_probability(ds0), dgrid);
        auto fit_json = [](const metrics::ExponentialFit& f) {
            return nlohmann::json{{"offset", f.offset}, {"amplitude", f.amplitude}, {"rate", f.rate},
                                  {"d", f.deviation.d}, {"d_squared", f.deviation.d_squared}};
        };
        r["degenerate"] = {{"band_width", dp.band_width},
                           {"lambda", dp.lambda},
                           {"tau", c.tau},
                           {"window", {c.tau - w, c.tau}},
                           {"window_mean", detail::window_mean(dgrid, drho, c.tau - w, c.tau)},
                           {"best_exponential", fit_json(free_fit)},
                           {"best_exponential_anchored", fit_json(anchored)},
                           {"rates", rates_json(dp)},
                           {"conditions", to_json(check_conditions(dp))}};
        res.series.push_back({"reverse_degenerate.csv", std::move(dtr), dh.rho11, dh.coherence});
    }
    return res;
}

// ----------------------------- check -----------------------------------------

inline ScenarioResult run_check(const RunConfig& c) {
    ScenarioResult res;
    res.config = c;
    const auto m = build_model(c.model);
    auto& r = res.report;
    r["conditions"] = to_json(check_conditions(c.model));
    if (c.model.band_width > 0.0) {
        r["homogeneity"] = to_json(homogeneity_diagnostic(m, c.model.band_width / 10.0));
    }
    r["rates"] = rates_json(c.model);
    r["kernel"] = to_json(band_kernel_timescales(m));
    r["coupling_mean_square"] = m.coupling().mean_square();
    r["equilibria"] = {{"ba", ham::ba_equilibrium(c.model.delta_e, c.kt_bath)}};
    if (c.model.band_width > 0.0) r["equilibria"]["ham"] = ham::equilibrium_rho11(ham::rates(c.model), 1.0);
    return res;
}

inline ScenarioResult run_scenario(const RunConfig& c) {
    validate(c);
    ScenarioResult res;
    switch (c.scenario) {
        case Scenario::evolve: res = run_evolve(c); break;
        case Scenario::ensemble: res = run_ensemble(c); break;
        case Scenario::sweep: res = run_sweep(c); break;
        case Scenario::kernel: res = run_kernel(c); break;
        case Scenario::reverse: res = run_reverse(c); break;
        case Scenario::check: res = run_check(c); break;
    }
    res.report["scenario"] = std::string(to_string(c.scenario));
    res.report["provenance"] = provenance(c);
    return res;
}

}  // namespace finitebath
