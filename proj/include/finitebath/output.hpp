// output.hpp: CSV, report.json, gnuplot script and a SHA-256 manifest
//
// Needs libcrypto (OpenSSL) for the digests.

#pragma once

#include "finitebath/errors.hpp"
#include "finitebath/observables.hpp"
#include "finitebath/scenarios.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace finitebath {

inline constexpr const char* kTrajectoryHeader =
    "t,rho11_exact,re_rho01,im_rho01,abs_rho01_sq,entropy,purity,p_coupled,rho11_ham,abs_rho01_sq_ham";

struct ManifestEntry {
    std::string path;  // relative to the output directory
    std::uintmax_t bytes{0};
    std::string sha256;
};

namespace io {

// Shortest round-trip representation; identical bits give identical text.
inline void put(std::string& out, double x) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{}) throw IoError("cannot format value");
    out.append(buf, p);
}

inline std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
        throw IoError("sha256: digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string s;
    s.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        s.push_back(hex[md[i] >> 4]);
        s.push_back(hex[md[i] & 15]);
    }
    return s;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot read '" + p.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::filesystem::path& p, std::string_view data) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + p.string() + "' for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.close();
    if (!out) throw IoError("write failed for '" + p.string() + "'");
}

}  // namespace io

// Rows are re-validated (trace, positivity) before they are written.
inline std::string trajectory_csv(const SeriesOutput& s) {
    const auto& tr = s.exact;
    if (s.rho11_ham.size() != tr.size() || s.coherence_ham.size() != tr.size())
        throw ValidationError("trajectory_csv: overlay length does not match trajectory in " + s.file);
    std::string out;
    out.reserve(tr.size() * 200);
    out += kTrajectoryHeader;
    out += '\n';
    for (std::size_t i = 0; i < tr.size(); ++i) {
        const auto& r = tr.rho[i];
        try {
            validate(r, 1e-9);
        } catch (const NumericalError& e) {
            std::ostringstream msg;
            msg << s.file << ", t = " << tr.t[i] << ": " << e.what();
            throw NumericalError(msg.str());
        }
        const double vals[] = {tr.t[i],     r.rho11,          r.rho01.real(),  r.rho01.imag(),  coherence(r),
                               entropy(r),  purity(r),        tr.p_coupled[i], s.rho11_ham[i], s.coherence_ham[i]};
        for (std::size_t k = 0; k < std::size(vals); ++k) {
            if (k) out += ',';
            io::put(out, vals[k]);
        }
        out += '\n';
    }
    return out;
}

inline std::string kernel_csv(const KernelOutput& k) {
    std::string out = "t,re_f,im_f,abs_f\n";
    for (std::size_t i = 0; i < k.t.size(); ++i) {
        io::put(out, k.t[i]);
        out += ',';
        io::put(out, k.f[i].real());
        out += ',';
        io::put(out, k.f[i].imag());
        out += ',';
        io::put(out, std::abs(k.f[i]));
        out += '\n';
    }
    return out;
}

inline std::string table_csv(const TableOutput& t) {
    std::string out;
    for (std::size_t k = 0; k < t.columns.size(); ++k) out += (k ? "," : "") + t.columns[k];
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) out += (k ? "," : "") + row[k];
        out += '\n';
    }
    return out;
}

// gnuplot script; it is written, never run.
inline std::string plot_script(const ScenarioResult& r) {
    std::ostringstream g;
    g << "# gnuplot -p plot.gp\n"
      << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set terminal pngcairo size 1000,640\n";
    for (const auto& s : r.series) {
        const std::string stem = s.file.substr(0, s.file.rfind('.'));
        g << "\nset output '" << stem << "_rho11.png'\n"
          << "set xlabel 't'\nset ylabel 'rho11'\nset yrange [0:1]\n"
          << "plot '" << s.file << "' using 1:2 with lines title 'exact', \\\n"
          << "     '" << s.file << "' using 1:9 with lines dt 2 title 'HAM'\n"
          << "set output '" << stem << "_coherence.png'\n"
          << "set ylabel '|rho01|^2'\nset autoscale y\n"
          << "plot '" << s.file << "' using 1:5 with lines title 'exact', \\\n"
          << "     '" << s.file << "' using 1:10 with lines dt 2 title 'HAM'\n";
    }
    if (r.kernel) {
        g << "\nset output 'kernel.png'\nset xlabel 't'\nset ylabel '|f(t)|'\nset yrange [0:1.05]\n"
          << "plot '" << r.kernel->file << "' using 1:4 with lines title '|f|'\n";
    }
    for (const auto& t : r.tables) {
        if (t.file == "histogram.csv") {
            g << "\nset output 'histogram.png'\nset xlabel 'D'\nset ylabel 'count'\nset autoscale\n"
              << "set style fill solid 0.5\n"
              << "plot 'histogram.csv' using (($1+$2)/2):3 with boxes title 'states'\n";
        } else if (t.file == "scaling.csv") {
            g << "\nset output 'scaling.png'\nset logscale xy\nset xlabel 'N'\nset ylabel 'D^2'\nset autoscale\n"
              << "plot 'scaling.csv' using 1:3 with linespoints title 'D^2'\nunset logscale\n";
        }
    }
    return g.str();
}

// Writes every artifact of `r` into `dir` and returns the manifest (also saved as manifest.json).
inline std::vector<ManifestEntry> write_outputs(const ScenarioResult& r, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());

    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& s : r.series) files.emplace_back(s.file, trajectory_csv(s));
    if (r.kernel) files.emplace_back(r.kernel->file, kernel_csv(*r.kernel));
    for (const auto& t : r.tables) files.emplace_back(t.file, table_csv(t));
    if (!r.series.empty() || r.kernel) files.emplace_back("plot.gp", plot_script(r));

    nlohmann::json report = r.report;
    nlohmann::json names = nlohmann::json::array();
    for (const auto& [name, _] : files) names.push_back(name);
    report["files"] = names;
    files.emplace_back("report.json", report.dump(2) + "\n");

    std::vector<ManifestEntry> manifest;
    for (const auto& [name, data] : files) {
        io::write_file(dir / name, data);
        manifest.push_back({name, data.size(), io::sha256_hex(data)});
    }
    std::sort(manifest.begin(), manifest.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
    nlohmann::json jm = nlohmann::json::array();
    for (const auto& e : manifest) jm.push_back({{"path", e.path}, {"bytes", e.bytes}, {"sha256", e.sha256}});
    io::write_file(dir / "manifest.json", nlohmann::json{{"files", jm}}.dump(2) + "\n");
    return manifest;
}

}  // namespace finitebath
