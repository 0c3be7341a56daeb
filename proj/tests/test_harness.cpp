#include "finitebath/finitebath.hpp"
#include "finitebath/output.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace finitebath;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("finitebath_test_" + name);
    fs::remove_all(p);
    return p;
}

RunConfig small_config(Scenario s) {
    RunConfig c;
    c.scenario = s;
    c.model.n1 = c.model.n2 = 40;
    c.model.lambda = 5e-3;
    c.t_max = 400.0;
    c.tau = 300.0;
    c.equilibrium_window = 100.0;
    c.ensemble_size = 5;
    c.sweep_n = {10, 20, 40};
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

// ----------------------------- Configuration ---------------------------------

TEST(Config, PresetIsPaperParameters) {
    const auto c = load_config(fs::path(FINITEBATH_PRESET_DIR) / "paper.json");
    EXPECT_EQ(c.model, paper_params());
    EXPECT_EQ(c.tau, 2000.0);
    EXPECT_EQ(c.sample_step, 1.0);
    EXPECT_EQ(c.sweep_n, (std::vector<std::size_t>{10, 25, 50, 100, 200, 400, 500, 800}));
}

TEST(Config, ZeroLevelsNamesKey) {
    const auto e = error_of(R"({"model": {"n1": 0}})");
    EXPECT_NE(e.find("n1"), std::string::npos) << e;
}

TEST(Config, TypoSuggestsKey) {
    const auto e = error_of(R"({"model": {"lamda": 1e-3}})");
    EXPECT_NE(e.find("lamda"), std::string::npos) << e;
    EXPECT_NE(e.find("did you mean 'lambda'"), std::string::npos) << e;
    EXPECT_NE(error_of(R"({"tua": 5})").find("'tau'"), std::string::npos);
}

TEST(Config, ParseErrorHasLineAndColumn) {
    const auto e = error_of("{\n  \"tau\": 5,\n  oops\n}");
    EXPECT_NE(e.find("line 3"), std::string::npos) << e;
}

TEST(Config, TypeAndRangeErrors) {
    EXPECT_NE(error_of(R"({"tau": "long"})").find("tau"), std::string::npos);
    EXPECT_NE(error_of(R"({"sample_step": 0})").find("sample_step"), std::string::npos);
    EXPECT_NE(error_of(R"({"t_max": 100, "tau": 2000})").find("t_max"), std::string::npos);
    EXPECT_NE(error_of(R"({"scenario": "evolvee"})").find("scenario"), std::string::npos);
    EXPECT_NE(error_of(R"({"sweep": {"mode": "wide"}})").find("sweep.mode"), std::string::npos);
}

TEST(Config, RoundTripThroughJson) {
    RunConfig c = small_config(Scenario::sweep);
    c.sweep_mode = SweepMode::fixed_width;
    c.initial.kind = InitialKind::superposition;
    const auto back = config_from_json(to_json(c));
    EXPECT_EQ(to_json(back), to_json(c));
}

TEST(Config, SweepModes) {
    const auto base = paper_params();
    EXPECT_DOUBLE_EQ(sweep_params(base, SweepMode::fixed_density, 100).band_width, 0.1);
    EXPECT_DOUBLE_EQ(sweep_params(base, SweepMode::fixed_width, 100).band_width, 0.5);
    // Level spacing, rates and criterion one are the same at every N in fixed_density mode.
    EXPECT_NEAR(ham::rates(sweep_params(base, SweepMode::fixed_density, 25)).r01, ham::rates(base).r01, 1e-18);
}

// ----------------------------- Parallel map ----------------------------------

TEST(ParallelMap, OrderedAndErrorsPropagate) {
    const auto v = parallel_map(50, 4, [](std::size_t i) { return i * i; });
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i], i * i);
    EXPECT_THROW(parallel_map(10, 3,
                              [](std::size_t i) -> int {
                                  if (i == 7) throw NumericalError("boom");
                                  return 0;
                              }),
                 NumericalError);
}

// ----------------------------- Scenarios and outputs -------------------------

TEST(Outputs, Sha256KnownVector) {
    EXPECT_EQ(io::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Outputs, EvolveWritesCsvReportPlotManifest) {
    const auto dir = scratch("evolve");
    const auto res = run_scenario(small_config(Scenario::evolve));
    const auto manifest = write_outputs(res, dir);
    ASSERT_EQ(manifest.size(), 3u);
    EXPECT_TRUE(fs::exists(dir / "evolve.csv"));
    EXPECT_TRUE(fs::exists(dir / "report.json"));
    EXPECT_TRUE(fs::exists(dir / "plot.gp"));
    EXPECT_TRUE(fs::exists(dir / "manifest.json"));
    const auto csv = slurp(dir / "evolve.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), kTrajectoryHeader);
    for (const auto& e : manifest) EXPECT_EQ(e.sha256, io::sha256_hex(slurp(dir / e.path))) << e.path;

    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    for (const char* k : {"rates", "equilibria", "deviation", "conditions", "provenance"})
        EXPECT_TRUE(report.contains(k)) << k;
    EXPECT_TRUE(report["equilibria"].contains("ham"));
    EXPECT_TRUE(report["equilibria"].contains("ham_literal"));
    EXPECT_TRUE(report["equilibria"].contains("ba"));
    EXPECT_EQ(report["provenance"]["config"]["model"]["n1"], 40);
    const auto plot = slurp(dir / "plot.gp");
    EXPECT_NE(plot.find("'evolve.csv'"), std::string::npos);
}

TEST(Outputs, SweepWritesOneCsvPerSize) {
    const auto dir = scratch("sweep");
    auto c = small_config(Scenario::sweep);
    c.sweep_n = {5, 10, 20, 40};
    const auto res = run_scenario(c);
    write_outputs(res, dir);
    for (const char* f : {"sweep_n0005.csv", "sweep_n0010.csv", "sweep_n0020.csv", "sweep_n0040.csv", "scaling.csv"})
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    EXPECT_EQ(report["scaling"]["points"].size(), 4u);
    EXPECT_TRUE(report["scaling"].contains("slope"));
}

TEST(Outputs, EnsembleHistogramCountsAllMembers) {
    const auto res = run_scenario(small_config(Scenario::ensemble));
    std::size_t total = 0;
    for (const auto& b : res.report["ensemble"]["histogram"]["bins"]) total += b["count"].get<std::size_t>();
    EXPECT_EQ(total, 5u);
    EXPECT_EQ(res.series.size(), 1u);
    EXPECT_NEAR(res.series[0].exact.rho.front().rho11, 0.75, 1e-14);
}

TEST(Outputs, WriterRejectsBrokenRho) {
    auto res = run_scenario(small_config(Scenario::evolve));
    res.series[0].exact.rho[5].rho11 += 0.1;
    EXPECT_THROW(write_outputs(res, scratch("broken")), NumericalError);
}

TEST(Outputs, UnwritableDirectory) {
    const auto res = run_scenario(small_config(Scenario::check));
    const auto blocker = scratch("blocker");
    std::ofstream(blocker) << "file";
    EXPECT_THROW(write_outputs(res, blocker / "sub"), IoError);
}

TEST(Scenarios, ReverseCoversNegativeTimes) {
    auto c = small_config(Scenario::reverse);
    c.degenerate.enabled = false;
    const auto res = run_scenario(c);
    EXPECT_EQ(res.series.size(), 1u);
    EXPECT_EQ(res.series[0].exact.t.front(), -400.0);
    EXPECT_TRUE(res.report["reverse"].contains("backward_mean"));
}

TEST(Scenarios, DegenerateVariantHasNoRateOverlay) {
    auto c = small_config(Scenario::reverse);
    c.degenerate.lambda = 1e-3;
    const auto res = run_scenario(c);
    ASSERT_EQ(res.series.size(), 2u);
    EXPECT_TRUE(std::isnan(res.series[1].rho11_ham[3]));
    EXPECT_FALSE(res.report["degenerate"]["rates"]["defined"].get<bool>());
}

TEST(Determinism, RerunAndWorkerCountGiveIdenticalFiles) {
    for (auto s : {Scenario::ensemble, Scenario::sweep}) {
        auto c = small_config(s);
        c.workers = 1;
        const auto a = write_outputs(run_scenario(c), scratch("det_a"));
        const auto b = write_outputs(run_scenario(c), scratch("det_b"));
        c.workers = 3;
        const auto k = write_outputs(run_scenario(c), scratch("det_k"));
        ASSERT_EQ(a.size(), k.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_EQ(a[i].sha256, b[i].sha256) << a[i].path;
            EXPECT_EQ(a[i].sha256, k[i].sha256) << a[i].path;
        }
    }
}

// ----------------------------- CLI -------------------------------------------

namespace {
int run_cli(const std::string& args) {
    const std::string cmd = std::string(FINITEBATH_CLI) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}
}  // namespace

TEST(Cli, ExitCodes) {
    const auto dir = scratch("cli");
    fs::create_directories(dir);
    EXPECT_EQ(run_cli("check --out " + (dir / "ok").string()), 0);
    EXPECT_TRUE(fs::exists(dir / "ok" / "report.json"));
    std::ofstream(dir / "bad.json") << R"({"model": {"lamda": 1}})";
    EXPECT_EQ(run_cli("check --config " + (dir / "bad.json").string()), 2);
    EXPECT_EQ(run_cli("frobnicate"), 2);
    std::ofstream(dir / "blocker") << "x";
    EXPECT_EQ(run_cli("check --out " + (dir / "blocker" / "sub").string()), 1);
}

TEST(Cli, SmallEvolve) {
    const auto dir = scratch("cli_evolve");
    EXPECT_EQ(run_cli("evolve --n 30 --t-max 2500 --out " + dir.string()), 0);
    EXPECT_TRUE(fs::exists(dir / "evolve.csv"));
    EXPECT_TRUE(fs::exists(dir / "manifest.json"));
}
