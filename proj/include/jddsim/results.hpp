#pragma once

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "jddsim/alist.hpp"
#include "jddsim/harness.hpp"
#include "jddsim/version.hpp"

namespace jddsim {

namespace detail {

/// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double parsed = std::strtod(buf, nullptr);
    if (parsed == v) {
        for (int prec = 1; prec < 17; ++prec) {
            char shorter[64];
            std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
            if (std::strtod(shorter, nullptr) == v) return shorter;
        }
    }
    return buf;
}

}  // namespace detail

inline constexpr const char* kCsvHeader = "ebno_db,ber,fer,bit_errors,frame_errors,frames,avg_iterations,truncated";

inline void write_csv(std::ostream& out, const std::vector<BerPoint>& points) {
    out << kCsvHeader << '\n';
    for (const auto& p : points) {
        out << detail::format_double(p.ebno_db) << ',' << detail::format_double(p.ber) << ','
            << detail::format_double(p.fer) << ',' << p.bit_errors << ',' << p.frame_errors << ',' << p.frames
            << ',' << detail::format_double(p.avg_iterations) << ',' << (p.truncated ? 1 : 0) << '\n';
    }
}

inline std::vector<BerPoint> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("csv: empty input");
    if (line.size() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) throw std::runtime_error("csv: unexpected header '" + line + "'");
    std::vector<BerPoint> points;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.size() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 8)
            throw std::runtime_error("csv line " + std::to_string(line_no) + ": expected 8 fields");
        BerPoint p;
        try {
            p.ebno_db = std::stod(fields[0]);
            p.ber = std::stod(fields[1]);
            p.fer = std::stod(fields[2]);
            p.bit_errors = std::stoll(fields[3]);
            p.frame_errors = std::stoll(fields[4]);
            p.frames = std::stoll(fields[5]);
            p.avg_iterations = std::stod(fields[6]);
            p.truncated = std::stoi(fields[7]) != 0;
        } catch (const std::exception&) {
            throw std::runtime_error("csv line " + std::to_string(line_no) + ": malformed field");
        }
        if (p.ber > 0.0 && p.frames > 0)
            p.info_bits_total = std::llround(static_cast<double>(p.bit_errors) / p.ber);
        points.push_back(p);
    }
    return points;
}

inline void write_csv_file(const std::string& path, const std::vector<BerPoint>& points) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_csv(out, points);
}

inline std::vector<BerPoint> read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_csv(in);
}

/// Eb/N0 (dB) at which a measured curve crosses `target_ber`, interpolating
/// linearly in (Eb/N0, log10 BER) on the first bracketing segment. Points
/// with zero BER cannot enter the interpolation; the target must be bracketed.
inline double ebno_at_ber(const std::vector<BerPoint>& curve, double target_ber) {
    if (!(target_ber > 0.0)) throw std::invalid_argument("target BER must be positive");
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        const auto& a = curve[i];
        const auto& b = curve[i + 1];
        if (!(a.ber > 0.0) || !(b.ber > 0.0)) continue;
        if (a.ber >= target_ber && target_ber >= b.ber) {
            if (a.ber == b.ber) return a.ebno_db;
            const double la = std::log10(a.ber), lb = std::log10(b.ber), lt = std::log10(target_ber);
            return a.ebno_db + (b.ebno_db - a.ebno_db) * (la - lt) / (la - lb);
        }
    }
    std::ostringstream msg;
    msg << "curve does not bracket BER " << target_ber;
    throw std::runtime_error(msg.str());
}

/// Eb/N0 penalty of curve_a relative to curve_b at the target BER
/// (positive when curve_a needs more SNR).
inline double gap_at_ber(const std::vector<BerPoint>& curve_a, const std::vector<BerPoint>& curve_b,
                         double target_ber) {
    return ebno_at_ber(curve_a, target_ber) - ebno_at_ber(curve_b, target_ber);
}

/// Full description of a run; written beside every results file. Re-running
/// from a manifest reproduces the counts exactly.
struct RunManifest {
    SweepConfig config;
    std::string code_kind;  // "alist" | "generated" | "uncoded"
    std::string alist_path;
    int code_n = 0;
    int gen_col_weight = 0;
    int gen_row_weight = 0;
    std::uint64_t gen_seed = 0;
    int k_effective = 0;
    double rate = 0.0;
    std::string code_fingerprint;
    std::string results_csv;
    std::string created_utc;
};

inline std::string fingerprint_hex(const ParityCheckMatrix& H) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(H.fingerprint()));
    return buf;
}

inline std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline RunManifest make_manifest(const SweepConfig& cfg, const Code& code, const std::string& results_csv) {
    RunManifest m;
    m.config = cfg;
    switch (code.source) {
        case Code::Source::alist: m.code_kind = "alist"; break;
        case Code::Source::generated: m.code_kind = "generated"; break;
        case Code::Source::uncoded: m.code_kind = "uncoded"; break;
    }
    m.alist_path = code.alist_path;
    m.code_n = code.H.cols();
    m.gen_col_weight = code.gen_col_weight;
    m.gen_row_weight = code.gen_row_weight;
    m.gen_seed = code.gen_seed;
    m.k_effective = code.encoder.k();
    m.rate = code.rate();
    m.code_fingerprint = fingerprint_hex(code.H);
    m.results_csv = results_csv;
    m.created_utc = utc_timestamp();
    return m;
}

inline nlohmann::json to_json(const RunManifest& m) {
    nlohmann::json j;
    j["tool"] = kToolName;
    j["version"] = kVersion;
    j["created_utc"] = m.created_utc;
    j["results_csv"] = m.results_csv;
    j["config"] = {
        {"decoder", to_string(m.config.decoder)},
        {"schedule", m.config.schedule == Schedule::chain_sweep ? "chain" : "flood"},
        {"ebno_start_db", m.config.ebno_start_db},
        {"ebno_stop_db", m.config.ebno_stop_db},
        {"ebno_step_db", m.config.ebno_step_db},
        {"iterations", m.config.iterations},
        {"early_stop", m.config.early_stop},
        {"min_bit_errors", m.config.min_bit_errors},
        {"min_frame_errors", m.config.min_frame_errors},
        {"max_frames", m.config.max_frames},
        {"seed", m.config.seed},
        {"workers", m.config.workers},
        {"stop_below_ber", m.config.stop_below_ber},
    };
    j["code"] = {
        {"kind", m.code_kind},
        {"n", m.code_n},
        {"k_effective", m.k_effective},
        {"rate", m.rate},
        {"fingerprint", m.code_fingerprint},
    };
    if (m.code_kind == "alist") j["code"]["alist_path"] = m.alist_path;
    if (m.code_kind == "generated") {
        j["code"]["col_weight"] = m.gen_col_weight;
        j["code"]["row_weight"] = m.gen_row_weight;
        j["code"]["gen_seed"] = m.gen_seed;
    }
    return j;
}

inline RunManifest manifest_from_json(const nlohmann::json& j) {
    RunManifest m;
    m.created_utc = j.value("created_utc", "");
    m.results_csv = j.value("results_csv", "");
    const auto& c = j.at("config");
    m.config.decoder = decoder_kind_from_string(c.at("decoder").get<std::string>());
    m.config.schedule = c.value("schedule", "chain") == std::string("flood") ? Schedule::flooding
                                                                             : Schedule::chain_sweep;
    m.config.ebno_start_db = c.at("ebno_start_db").get<double>();
    m.config.ebno_stop_db = c.at("ebno_stop_db").get<double>();
    m.config.ebno_step_db = c.at("ebno_step_db").get<double>();
    m.config.iterations = c.at("iterations").get<int>();
    m.config.early_stop = c.value("early_stop", true);
    m.config.min_bit_errors = c.at("min_bit_errors").get<long long>();
    m.config.min_frame_errors = c.value("min_frame_errors", 0LL);
    m.config.max_frames = c.at("max_frames").get<long long>();
    m.config.seed = c.at("seed").get<std::uint64_t>();
    m.config.workers = c.at("workers").get<int>();
    m.config.stop_below_ber = c.value("stop_below_ber", 0.0);
    const auto& k = j.at("code");
    m.code_kind = k.at("kind").get<std::string>();
    m.code_n = k.at("n").get<int>();
    m.k_effective = k.value("k_effective", 0);
    m.rate = k.value("rate", 0.0);
    m.code_fingerprint = k.value("fingerprint", "");
    m.alist_path = k.value("alist_path", "");
    m.gen_col_weight = k.value("col_weight", 0);
    m.gen_row_weight = k.value("row_weight", 0);
    m.gen_seed = k.value("gen_seed", 0ull);
    return m;
}

inline void write_manifest_file(const std::string& path, const RunManifest& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << to_json(m).dump(2) << '\n';
}

inline RunManifest read_manifest_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return manifest_from_json(j);
}

/// Rebuilds the code a manifest describes and verifies its fingerprint.
inline Code code_from_manifest(const RunManifest& m) {
    Code code = [&] {
        if (m.code_kind == "generated")
            return Code::generated(m.code_n, m.gen_col_weight, m.gen_row_weight, m.gen_seed);
        if (m.code_kind == "uncoded") return Code::uncoded(m.code_n);
        if (m.code_kind == "alist")
            return Code::from_matrix(load_alist_file(m.alist_path), Code::Source::alist, m.alist_path);
        throw std::runtime_error("manifest: unknown code kind '" + m.code_kind + "'");
    }();
    if (!m.code_fingerprint.empty() && fingerprint_hex(code.H) != m.code_fingerprint)
        throw std::runtime_error("manifest: code fingerprint mismatch (expected " + m.code_fingerprint +
                                 ", rebuilt " + fingerprint_hex(code.H) + ")");
    return code;
}

/// Emits a python/matplotlib script that plots the given CSV curves with a
/// logarithmic BER axis and writes a PNG next to itself.
inline void emit_plot_script(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& curves,
                             const std::string& png_name) {
    out << "#!/usr/bin/env python3\n";
    out << "import csv\n";
    out << "import matplotlib\n";
    out << "matplotlib.use(\"Agg\")\n";
    out << "import matplotlib.pyplot as plt\n\n";
    out << "def load(path):\n";
    out << "    xs, ys = [], []\n";
    out << "    with open(path) as f:\n";
    out << "        for row in csv.DictReader(f):\n";
    out << "            ber = float(row[\"ber\"])\n";
    out << "            if ber > 0:\n";
    out << "                xs.append(float(row[\"ebno_db\"]))\n";
    out << "                ys.append(ber)\n";
    out << "    return xs, ys\n\n";
    out << "plt.figure(figsize=(6, 4.5))\n";
    for (const auto& [path, label] : curves) {
        out << "xs, ys = load(" << nlohmann::json(path).dump() << ")\n";
        out << "plt.semilogy(xs, ys, marker=\"o\", label=" << nlohmann::json(label).dump() << ")\n";
    }
    out << "plt.xlabel(\"Eb/N0 [dB]\")\n";
    out << "plt.ylabel(\"BER\")\n";
    out << "plt.grid(True, which=\"both\", alpha=0.4)\n";
    out << "plt.legend()\n";
    out << "plt.tight_layout()\n";
    out << "plt.savefig(" << nlohmann::json(png_name).dump() << ", dpi=160)\n";
    out << "print(\"wrote " << png_name << "\")\n";
}

}
