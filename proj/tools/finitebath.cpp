// finitebath.cpp: Command-line front end
//
//   finitebath <check|evolve|ensemble|sweep|kernel|reverse> [--config FILE] [--out DIR] [--workers K] ...
//
// Exit codes: 0 ok, 2 invalid input, 1 runtime failure.

#include "finitebath/finitebath.hpp"
#include "finitebath/output.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace fb = finitebath;

namespace {

struct Overrides {
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> workers;
    std::optional<std::uint64_t> coupling_seed;
    std::optional<std::uint64_t> state_seed;
    std::optional<double> t_max;
    std::optional<std::size_t> members;
    std::optional<std::string> init;
    std::optional<std::string> sweep_mode;
    std::optional<std::size_t> n;
};

fb::RunConfig assemble(const Overrides& o, fb::Scenario scenario) {
    fb::RunConfig c = o.config_path.empty() ? fb::RunConfig{} : fb::load_config(o.config_path);
    c.scenario = scenario;
    if (o.out_dir) c.output_dir = *o.out_dir;
    if (o.workers) c.workers = *o.workers;
    if (o.coupling_seed) c.model.seed_coupling = *o.coupling_seed;
    if (o.state_seed) c.initial.seed = *o.state_seed;
    if (o.t_max) c.t_max = *o.t_max;
    if (o.members) c.ensemble_size = *o.members;
    if (o.n) c.model.n1 = c.model.n2 = *o.n;
    if (o.init) {
        const auto k = fb::parse_initial_kind(*o.init);
        if (!k) throw fb::ValidationError("--init: expected excited, superposition or subspace_random");
        c.initial.kind = *k;
    }
    if (o.sweep_mode) {
        const auto m = fb::parse_sweep_mode(*o.sweep_mode);
        if (!m) throw fb::ValidationError("--mode: expected fixed_density or fixed_width");
        c.sweep_mode = *m;
    }
    fb::validate(c);
    return c;
}

// A few headline numbers so a run is readable without opening report.json.
void summarize(const fb::ScenarioResult& r, std::ostream& os) {
    const auto& j = r.report;
    auto show = [&](const char* label, const nlohmann::json& v) {
        if (!v.is_null()) os << "  " << label << " = " << v.dump() << '\n';
    };
    if (j.contains("conditions"))
        os << "  conditions: criterion_one = " << j["conditions"]["criterion_one"].dump()
           << ", criterion_two = " << j["conditions"]["criterion_two"].dump()
           << (j["conditions"]["pass"].get<bool>() ? " (pass)" : " (fail)") << '\n';
    if (j.contains("rates") && j["rates"].value("defined", false)) show("R01", j["rates"]["r01"]);
    if (j.contains("equilibria"))
        for (auto it = j["equilibria"].begin(); it != j["equilibria"].end(); ++it)
            if (it.value().is_number()) show(("equilibrium." + it.key()).c_str(), it.value());
    if (j.contains("deviation")) show("D", j["deviation"]["d"]);
    if (j.contains("coherence_fit")) show("coherence rate / R01", j["coherence_fit"].value("rate_over_r01", nlohmann::json()));
    if (j.contains("entropy")) show("entropy (late mean)", j["entropy"]["window_mean"]);
    if (j.contains("ensemble")) {
        show("median D", j["ensemble"]["median_d"]);
        show("fraction D <= 0.05", j["ensemble"]["fraction_d_le_0_05"]);
    }
    if (j.contains("scaling")) show("slope d ln D^2 / d ln N", j["scaling"]["slope"]);
    if (j.contains("kernel")) {
        show("kernel half width", j["kernel"]["half_width"]);
        show("kernel recurrence |f|", j["kernel"]["recurrence_value"]);
    }
    if (j.contains("rho11_late")) show("max rho11 late", j["rho11_late"]["max"]);
    if (j.contains("reverse")) {
        show("backward mean", j["reverse"]["backward_mean"]);
        show("forward mean", j["reverse"]["forward_mean"]);
    }
    if (j.contains("degenerate")) {
        show("degenerate window mean", j["degenerate"]["window_mean"]);
        show("degenerate D vs best exponential", j["degenerate"]["best_exponential"]["d"]);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-bath thermalization: exact dynamics of a spin in a two-band bath vs rate equations"};
    app.require_subcommand(1, 1);
    Overrides o;
    app.add_option("--config", o.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--out", o.out_dir, "Output directory");
    app.add_option("--workers", o.workers, "Worker threads (ensemble members / sweep points)");
    app.add_option("--coupling-seed", o.coupling_seed, "Seed of the coupling matrix");
    app.add_option("--state-seed", o.state_seed, "Seed of the initial bath state");
    app.add_option("--t-max", o.t_max, "Final time");
    app.add_option("--n", o.n, "Levels per band (n1 = n2)");

    struct Cmd {
        const char* name;
        fb::Scenario scenario;
        const char* help;
    };
    const Cmd cmds[] = {
        {"check", fb::Scenario::check, "Validity conditions, homogeneity, rates, kernel timescales"},
        {"evolve", fb::Scenario::evolve, "One trajectory with rate-equation overlay and deviation"},
        {"ensemble", fb::Scenario::ensemble, "Deviation statistics over random initial states"},
        {"sweep", fb::Scenario::sweep, "Deviation vs bath size and the scaling fit"},
        {"kernel", fb::Scenario::kernel, "Band kernel and long-time recurrence check"},
        {"reverse", fb::Scenario::reverse, "Backward propagation and the degenerate-band variant"},
    };
    fb::Scenario chosen = fb::Scenario::check;
    for (const auto& c : cmds) {
        auto* sub = app.add_subcommand(c.name, c.help);
        sub->fallthrough();
        sub->callback([&chosen, s = c.scenario] { chosen = s; });
        if (c.scenario == fb::Scenario::evolve)
            sub->add_option("--init", o.init, "excited | superposition | subspace_random");
        if (c.scenario == fb::Scenario::ensemble) sub->add_option("--members", o.members, "Ensemble size");
        if (c.scenario == fb::Scenario::sweep) sub->add_option("--mode", o.sweep_mode, "fixed_density | fixed_width");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const auto cfg = assemble(o, chosen);
        const auto t0 = std::chrono::steady_clock::now();
        const auto result = fb::run_scenario(cfg);
        const auto manifest = fb::write_outputs(result, cfg.output_dir);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << fb::to_string(cfg.scenario) << ": " << manifest.size() << " files in " << cfg.output_dir << " ("
                  << secs << " s)\n";
        summarize(result, std::cout);
        return 0;
    } catch (const fb::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return 1;
    }
}
