#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <sstream>
#include <unistd.h>

#include "jddsim/results.hpp"

using namespace jddsim;

namespace {

std::vector<BerPoint> synthetic_curve(double shift_db) {
    // One decade per dB through the region of interest.
    std::vector<BerPoint> curve;
    for (int i = 0; i < 6; ++i) {
        BerPoint p;
        p.ebno_db = 2.0 + shift_db + 0.5 * i;
        p.ber = std::pow(10.0, -2.0 - 0.5 * i);
        p.fer = p.ber * 10;
        p.frames = 1000 + i;
        p.bit_errors = static_cast<long long>(p.ber * 1e7);
        p.frame_errors = 10 + i;
        p.avg_iterations = 5.5;
        curve.push_back(p);
    }
    return curve;
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("jddsim_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("csv: write/read round trip preserves every field") {
    const auto curve = synthetic_curve(0.0);
    std::ostringstream out;
    write_csv(out, curve);
    std::istringstream in(out.str());
    const auto back = read_csv(in);
    REQUIRE(back.size() == curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i) {
        REQUIRE(back[i].ebno_db == curve[i].ebno_db);
        REQUIRE(back[i].ber == curve[i].ber);
        REQUIRE(back[i].fer == curve[i].fer);
        REQUIRE(back[i].bit_errors == curve[i].bit_errors);
        REQUIRE(back[i].frame_errors == curve[i].frame_errors);
        REQUIRE(back[i].frames == curve[i].frames);
        REQUIRE(back[i].avg_iterations == curve[i].avg_iterations);
        REQUIRE(back[i].truncated == curve[i].truncated);
    }
    // Interpolation through the reparsed curve must be unchanged.
    REQUIRE(ebno_at_ber(back, 1e-4) == ebno_at_ber(curve, 1e-4));
    REQUIRE(out.str().substr(0, out.str().find('\n')) == kCsvHeader);
}

TEST_CASE("csv: malformed input is rejected") {
    std::istringstream bad_header("ebno,ber\n1,2\n");
    REQUIRE_THROWS_AS(read_csv(bad_header), std::runtime_error);
    std::istringstream bad_fields(std::string(kCsvHeader) + "\n1,2,3\n");
    REQUIRE_THROWS_AS(read_csv(bad_fields), std::runtime_error);
}

TEST_CASE("gap: identical curves have zero gap") {
    const auto curve = synthetic_curve(0.0);
    REQUIRE(gap_at_ber(curve, curve, 1e-4) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("gap: a pure shift is recovered exactly") {
    const auto base = synthetic_curve(0.0);
    const auto shifted = synthetic_curve(0.5);
    REQUIRE(gap_at_ber(shifted, base, 1e-4) == Catch::Approx(0.5).epsilon(1e-9));
    REQUIRE(gap_at_ber(base, shifted, 1e-4) == Catch::Approx(-0.5).epsilon(1e-9));
}

TEST_CASE("gap: unbracketed targets raise instead of extrapolating") {
    const auto curve = synthetic_curve(0.0);
    REQUIRE_THROWS_AS(ebno_at_ber(curve, 1e-9), std::runtime_error);
    REQUIRE_THROWS_AS(ebno_at_ber(curve, 0.5), std::runtime_error);
    REQUIRE_THROWS_AS(ebno_at_ber(curve, -1.0), std::invalid_argument);

    // Zero-BER points cannot enter the interpolation.
    auto with_zero = curve;
    with_zero.back().ber = 0.0;
    REQUIRE_NOTHROW(ebno_at_ber(with_zero, 1e-4));
    REQUIRE_THROWS_AS(ebno_at_ber(with_zero, 1e-5), std::runtime_error);
}

TEST_CASE("fingerprint: stable, order-independent of construction path") {
    const ParityCheckMatrix a = generate_regular_code(48, 3, 12, 4);
    const ParityCheckMatrix b = generate_regular_code(48, 3, 12, 4);
    const ParityCheckMatrix c = generate_regular_code(48, 3, 12, 5);
    REQUIRE(fingerprint_hex(a) == fingerprint_hex(b));
    REQUIRE(fingerprint_hex(a) != fingerprint_hex(c));
    REQUIRE(fingerprint_hex(a).size() == 16);
}

TEST_CASE("manifest: round trip and exact replay") {
    TempDir tmp;
    const Code code = Code::generated(120, 3, 12, 7);
    SweepConfig cfg;
    cfg.decoder = DecoderKind::sca;
    cfg.ebno_start_db = 2.0;
    cfg.ebno_stop_db = 2.5;
    cfg.ebno_step_db = 0.5;
    cfg.min_bit_errors = 80;
    cfg.max_frames = 20000;
    cfg.iterations = 8;
    cfg.seed = 31;
    cfg.workers = 2;

    const auto points = run_sweep(cfg, code);
    const std::string csv_path = tmp.file("run.csv");
    write_csv_file(csv_path, points);
    const std::string manifest_path = tmp.file("run.csv.manifest.json");
    write_manifest_file(manifest_path, make_manifest(cfg, code, csv_path));

    const RunManifest m = read_manifest_file(manifest_path);
    REQUIRE(m.code_kind == "generated");
    REQUIRE(m.code_n == 120);
    REQUIRE(m.rate == Catch::Approx(code.rate()));

    const Code rebuilt = code_from_manifest(m);
    REQUIRE(rebuilt.H == code.H);
    SweepConfig replay_cfg = m.config;
    replay_cfg.workers = 1;  // counts must not depend on this
    const auto replayed = run_sweep(replay_cfg, rebuilt);
    REQUIRE(replayed.size() == points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        REQUIRE(replayed[i].bit_errors == points[i].bit_errors);
        REQUIRE(replayed[i].frame_errors == points[i].frame_errors);
        REQUIRE(replayed[i].frames == points[i].frames);
    }
}

TEST_CASE("manifest: fingerprint mismatch is detected") {
    TempDir tmp;
    const Code code = Code::generated(48, 3, 12, 9);
    SweepConfig cfg;
    RunManifest m = make_manifest(cfg, code, "x.csv");
    m.gen_seed = 10;  // different code than the fingerprint says
    m.code_n = 48;
    m.gen_col_weight = 3;
    m.gen_row_weight = 12;
    REQUIRE_THROWS_AS(code_from_manifest(m), std::runtime_error);
}

TEST_CASE("plot script: references the input curves") {
    std::ostringstream out;
    emit_plot_script(out, {{"a.csv", "first"}, {"b.csv", "second"}}, "fig.png");
    const std::string script = out.str();
    REQUIRE(script.find("a.csv") != std::string::npos);
    REQUIRE(script.find("b.csv") != std::string::npos);
    REQUIRE(script.find("semilogy") != std::string::npos);
    REQUIRE(script.find("fig.png") != std::string::npos);
}
