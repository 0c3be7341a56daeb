// config.hpp: Run configuration: JSON schema, defaults, validation

#pragma once

#include "finitebath/errors.hpp"
#include "finitebath/model.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace finitebath {

enum class Scenario { evolve, ensemble, sweep, kernel, reverse, check };

enum class InitialKind { excited, superposition, subspace_random };

// How the bath changes with N in a sweep: keep the level spacing band_width/N of the
// base model (rates and HAM curve unchanged), or keep band_width itself.
enum class SweepMode { fixed_density, fixed_width };

inline std::string_view to_string(SweepMode m) { return m == SweepMode::fixed_density ? "fixed_density" : "fixed_width"; }

inline std::optional<SweepMode> parse_sweep_mode(std::string_view s) {
    if (s == "fixed_density") return SweepMode::fixed_density;
    if (s == "fixed_width") return SweepMode::fixed_width;
    return std::nullopt;
}

inline std::string_view to_string(Scenario s) {
    switch (s) {
        case Scenario::evolve: return "evolve";
        case Scenario::ensemble: return "ensemble";
        case Scenario::sweep: return "sweep";
        case Scenario::kernel: return "kernel";
        case Scenario::reverse: return "reverse";
        case Scenario::check: return "check";
    }
    return "?";
}

inline std::string_view to_string(InitialKind k) {
    switch (k) {
        case InitialKind::excited: return "excited";
        case InitialKind::superposition: return "superposition";
        case InitialKind::subspace_random: return "subspace_random";
    }
    return "?";
}

inline std::optional<Scenario> parse_scenario(std::string_view s) {
    for (auto v : {Scenario::evolve, Scenario::ensemble, Scenario::sweep, Scenario::kernel, Scenario::reverse,
                   Scenario::check})
        if (to_string(v) == s) return v;
    return std::nullopt;
}

inline std::optional<InitialKind> parse_initial_kind(std::string_view s) {
    for (auto v : {InitialKind::excited, InitialKind::superposition, InitialKind::subspace_random})
        if (to_string(v) == s) return v;
    return std::nullopt;
}

struct InitialStateConfig {
    InitialKind kind{InitialKind::excited};
    std::uint64_t seed{1};
    double p_excited{0.75};  // subspace_random only
};

// Second model run alongside `reverse`: collapsed bands with weaker coupling.
struct DegenerateVariant {
    bool enabled{true};
    double band_width{0.0};
    double lambda{1e-4};
};

struct RunConfig {
    ModelParams model{paper_params()};
    Scenario scenario{Scenario::evolve};
    InitialStateConfig initial{};
    std::optional<double> t_max;  // unset: per-scenario default
    double sample_step{1.0};
    double tau{2000.0};
    double kt_bath{5.0};
    std::size_t ensemble_size{500};
    double ensemble_p_excited{0.75};
    std::vector<std::size_t> sweep_n{10, 25, 50, 100, 200, 400, 500, 800};
    SweepMode sweep_mode{SweepMode::fixed_density};
    double histogram_bin{0.005};
    double equilibrium_window{500.0};  // late window for equilibrium means
    DegenerateVariant degenerate{};
    std::string output_dir{"out"};
    std::size_t workers{1};
};

inline double default_t_max(Scenario s) {
    switch (s) {
        case Scenario::kernel: return 10000.0;
        case Scenario::ensemble: return 2000.0;
        default: return 3000.0;
    }
}

inline double effective_t_max(const RunConfig& c) {
    if (c.t_max) return *c.t_max;
    return c.scenario == Scenario::ensemble ? c.tau : default_t_max(c.scenario);
}

// Model parameters for one sweep point, derived from the base model.
inline ModelParams sweep_params(const ModelParams& base, SweepMode mode, std::size_t n) {
    ModelParams p = base;
    p.n1 = p.n2 = n;
    if (mode == SweepMode::fixed_density)
        p.band_width = base.band_width * static_cast<double>(n) / static_cast<double>(std::max(base.n1, base.n2));
    return p;
}

inline bool needs_deviation(Scenario s) {
    return s == Scenario::evolve || s == Scenario::ensemble || s == Scenario::sweep;
}

inline void validate(const RunConfig& c) {
    validate(c.model);
    auto fail = [](const std::string& key, const std::string& what) { throw ValidationError(key + ": " + what); };
    if (!(c.sample_step > 0.0)) fail("sample_step", "must be > 0");
    if (!(c.tau > 0.0)) fail("tau", "must be > 0");
    if (!(c.kt_bath > 0.0)) fail("kt_bath", "must be > 0");
    const double tmax = effective_t_max(c);
    if (!(tmax > 0.0)) fail("t_max", "must be > 0");
    if (needs_deviation(c.scenario) && tmax < c.tau) fail("t_max", "must be >= tau when a deviation is requested");
    if (!(c.initial.p_excited >= 0.0 && c.initial.p_excited <= 1.0)) fail("initial_state.p_excited", "must lie in [0, 1]");
    if (!(c.ensemble_p_excited >= 0.0 && c.ensemble_p_excited <= 1.0)) fail("ensemble.p_excited", "must lie in [0, 1]");
    if (c.ensemble_size < 1) fail("ensemble.size", "must be >= 1");
    if (c.scenario == Scenario::sweep && c.sweep_n.size() < 3) fail("sweep.n", "needs at least 3 sizes for a fit");
    for (auto n : c.sweep_n)
        if (n < 1) fail("sweep.n", "sizes must be >= 1");
    if (c.scenario == Scenario::sweep) {
        for (auto n : c.sweep_n) {
            try {
                validate(sweep_params(c.model, c.sweep_mode, n));
            } catch (const ValidationError& e) {
                fail("sweep.n", "size " + std::to_string(n) + " gives invalid parameters: " + e.what());
            }
        }
    }
    if (!(c.histogram_bin > 0.0)) fail("ensemble.histogram_bin", "must be > 0");
    if (!(c.equilibrium_window > 0.0)) fail("equilibrium_window", "must be > 0");
    if (c.workers < 1) fail("workers", "must be >= 1");
    if (c.degenerate.enabled) {
        ModelParams d = c.model;
        d.band_width = c.degenerate.band_width;
        d.lambda = c.degenerate.lambda;
        try {
            validate(d);
        } catch (const ValidationError& e) {
            fail("reverse.degenerate", e.what());
        }
    }
}

// ----------------------------- JSON mapping ----------------------------------

namespace detail {

inline std::size_t edit_distance(std::string_view a, std::string_view b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

inline void reject_unknown(const nlohmann::json& obj, const std::string& where,
                           std::initializer_list<std::string_view> known) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const std::string& key = it.key();
        if (std::find(known.begin(), known.end(), key) != known.end()) continue;
        std::string msg = "unknown key '" + where + key + "'";
        std::string_view best;
        std::size_t best_d = 3;
        for (auto k : known) {
            const auto d = edit_distance(key, k);
            if (d < best_d) {
                best_d = d;
                best = k;
            }
        }
        if (!best.empty()) msg += " (did you mean '" + std::string(best) + "'?)";
        throw ValidationError(msg);
    }
}

template <typename T>
void read(const nlohmann::json& obj, const char* key, const std::string& where, T& out) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    const std::string path = where + key;
    if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ValidationError(path + ": expected a boolean");
        out = v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ValidationError(path + ": expected an integer");
        if (v.is_number_unsigned()) {
            out = static_cast<T>(v.get<std::uint64_t>());
        } else {
            const auto s = v.get<std::int64_t>();
            if (s < 0) throw ValidationError(path + ": must be >= 0");
            out = static_cast<T>(s);
        }
    } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ValidationError(path + ": expected a number");
        out = v.get<double>();
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ValidationError(path + ": expected a string");
        out = v.get<std::string>();
    }
}

inline const nlohmann::json& object(const nlohmann::json& j, const char* key, const std::string& where) {
    const auto& v = j.at(key);
    if (!v.is_object()) throw ValidationError(where + key + ": expected an object");
    return v;
}

}  // namespace detail

// Keys absent from the document keep their defaults. Unknown keys are rejected.
inline RunConfig config_from_json(const nlohmann::json& j, RunConfig c = {}) {
    using detail::read;
    if (!j.is_object()) throw ValidationError("config: top level must be an object");
    detail::reject_unknown(j, "",
                           {"model", "scenario", "initial_state", "t_max", "sample_step", "tau", "kt_bath", "ensemble",
                            "sweep", "reverse", "equilibrium_window", "output_dir", "workers"});
    if (j.contains("model")) {
        const auto& m = detail::object(j, "model", "");
        detail::reject_unknown(m, "model.", {"delta_e", "band_width", "n1", "n2", "lambda", "seed_coupling"});
        read(m, "delta_e", "model.", c.model.delta_e);
        read(m, "band_width", "model.", c.model.band_width);
        read(m, "n1", "model.", c.model.n1);
        read(m, "n2", "model.", c.model.n2);
        read(m, "lambda", "model.", c.model.lambda);
        read(m, "seed_coupling", "model.", c.model.seed_coupling);
        if (m.contains("n1") && c.model.n1 < 1) throw ValidationError("model.n1: must be >= 1");
        if (m.contains("n2") && c.model.n2 < 1) throw ValidationError("model.n2: must be >= 1");
    }
    if (j.contains("scenario")) {
        std::string s;
        read(j, "scenario", "", s);
        const auto sc = parse_scenario(s);
        if (!sc) throw ValidationError("scenario: unknown scenario '" + s + "'");
        c.scenario = *sc;
    }
    if (j.contains("initial_state")) {
        const auto& is = detail::object(j, "initial_state", "");
        detail::reject_unknown(is, "initial_state.", {"kind", "seed", "p_excited"});
        if (is.contains("kind")) {
            std::string k;
            read(is, "kind", "initial_state.", k);
            const auto kind = parse_initial_kind(k);
            if (!kind) throw ValidationError("initial_state.kind: unknown kind '" + k + "'");
            c.initial.kind = *kind;
        }
        read(is, "seed", "initial_state.", c.initial.seed);
        read(is, "p_excited", "initial_state.", c.initial.p_excited);
    }
    if (j.contains("t_max")) {
        double t = 0.0;
        read(j, "t_max", "", t);
        c.t_max = t;
    }
    read(j, "sample_step", "", c.sample_step);
    read(j, "tau", "", c.tau);
    read(j, "kt_bath", "", c.kt_bath);
    read(j, "equilibrium_window", "", c.equilibrium_window);
    if (j.contains("ensemble")) {
        const auto& e = detail::object(j, "ensemble", "");
        detail::reject_unknown(e, "ensemble.", {"size", "p_excited", "histogram_bin"});
        read(e, "size", "ensemble.", c.ensemble_size);
        read(e, "p_excited", "ensemble.", c.ensemble_p_excited);
        read(e, "histogram_bin", "ensemble.", c.histogram_bin);
    }
    if (j.contains("sweep")) {
        const auto& s = detail::object(j, "sweep", "");
        detail::reject_unknown(s, "sweep.", {"n", "mode"});
        if (s.contains("mode")) {
            std::string m;
            read(s, "mode", "sweep.", m);
            const auto mode = parse_sweep_mode(m);
            if (!mode) throw ValidationError("sweep.mode: expected 'fixed_density' or 'fixed_width', got '" + m + "'");
            c.sweep_mode = *mode;
        }
        if (s.contains("n")) {
            const auto& arr = s.at("n");
            if (!arr.is_array()) throw ValidationError("sweep.n: expected an array of integers");
            c.sweep_n.clear();
            for (const auto& v : arr) {
                if (!v.is_number_integer() || v.get<std::int64_t>() < 1)
                    throw ValidationError("sweep.n: entries must be integers >= 1");
                c.sweep_n.push_back(v.get<std::size_t>());
            }
        }
    }
    if (j.contains("reverse")) {
        const auto& r = detail::object(j, "reverse", "");
        detail::reject_unknown(r, "reverse.", {"degenerate"});
        if (r.contains("degenerate")) {
            const auto& d = detail::object(r, "degenerate", "reverse.");
            detail::reject_unknown(d, "reverse.degenerate.", {"enabled", "band_width", "lambda"});
            read(d, "enabled", "reverse.degenerate.", c.degenerate.enabled);
            read(d, "band_width", "reverse.degenerate.", c.degenerate.band_width);
            read(d, "lambda", "reverse.degenerate.", c.degenerate.lambda);
        }
    }
    read(j, "output_dir", "", c.output_dir);
    read(j, "workers", "", c.workers);
    validate(c);
    return c;
}

// Echo of every setting that influences results (output_dir and workers do not).
inline nlohmann::json to_json(const RunConfig& c) {
    nlohmann::json j;
    j["model"] = {{"delta_e", c.model.delta_e},       {"band_width", c.model.band_width},
                  {"n1", c.model.n1},                 {"n2", c.model.n2},
                  {"lambda", c.model.lambda},         {"seed_coupling", c.model.seed_coupling}};
    j["scenario"] = std::string(to_string(c.scenario));
    j["initial_state"] = {{"kind", std::string(to_string(c.initial.kind))},
                          {"seed", c.initial.seed},
                          {"p_excited", c.initial.p_excited}};
    j["t_max"] = effective_t_max(c);
    j["sample_step"] = c.sample_step;
    j["tau"] = c.tau;
    j["kt_bath"] = c.kt_bath;
    j["equilibrium_window"] = c.equilibrium_window;
    j["ensemble"] = {{"size", c.ensemble_size}, {"p_excited", c.ensemble_p_excited}, {"histogram_bin", c.histogram_bin}};
    j["sweep"] = {{"n", c.sweep_n}, {"mode", std::string(to_string(c.sweep_mode))}};
    j["reverse"] = {{"degenerate",
                     {{"enabled", c.degenerate.enabled},
                      {"band_width", c.degenerate.band_width},
                      {"lambda", c.degenerate.lambda}}}};
    return j;
}

inline RunConfig parse_config(std::string_view text, RunConfig defaults = {}) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // Translate the byte offset into line:column.
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream msg;
        msg << "config parse error at line " << line << ", column " << col << ": " << e.what();
        throw ValidationError(msg.str());
    }
    return config_from_json(j, std::move(defaults));
}

inline RunConfig load_config(const std::filesystem::path& path, RunConfig defaults = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("config: cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config(buf.str(), std::move(defaults));
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

}  // namespace finitebath
