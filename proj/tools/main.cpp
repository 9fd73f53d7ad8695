// Command-line front end: Eb/N0 sweeps for the three receivers, curve
// comparison at a target BER, manifest replay and plot-script emission.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "jddsim/jddsim.hpp"

namespace {

struct EbnoGrid {
    double start = 0.0, stop = 0.0, step = 0.25;
};

EbnoGrid parse_ebno(const std::string& text) {
    EbnoGrid g;
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(std::stod(tok));
    if (parts.size() == 1) {
        g.start = g.stop = parts[0];
    } else if (parts.size() == 3) {
        g.start = parts[0];
        g.stop = parts[1];
        g.step = parts[2];
    } else {
        throw CLI::ValidationError("--ebno", "expected START:STOP:STEP or a single value");
    }
    return g;
}

struct CodeGenSpec {
    int n = 0, wc = 0, wr = 0;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

CodeGenSpec parse_code_gen(const std::string& text) {
    CodeGenSpec spec;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw CLI::ValidationError("--code-gen", "expected key=value pairs");
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        if (key == "n") spec.n = std::stoi(value);
        else if (key == "wc") spec.wc = std::stoi(value);
        else if (key == "wr") spec.wr = std::stoi(value);
        else if (key == "seed") { spec.seed = std::stoull(value); spec.seed_given = true; }
        else throw CLI::ValidationError("--code-gen", "unknown key '" + key + "' (use n, wc, wr, seed)");
    }
    if (spec.n <= 0 || spec.wc <= 0 || spec.wr <= 0)
        throw CLI::ValidationError("--code-gen", "n, wc and wr are required");
    return spec;
}

std::string plot_png_name(const std::string& script_path) {
    const auto dot = script_path.rfind('.');
    const std::string stem = dot == std::string::npos ? script_path : script_path.substr(0, dot);
    return stem + ".png";
}

}  // namespace

int main(int argc, char** argv) {
    using namespace jddsim;

    CLI::App app{"DQPSK receiver simulator: joint demapper-decoder, serial concatenation and coherent QPSK"};
    app.set_version_flag("--version", std::string(kToolName) + " " + kVersion);

    std::string decoder_name;
    std::string code_path;
    std::string code_gen_text;
    std::string ebno_text;
    long long iters = 20;
    long long min_errors = 1000;
    long long min_frame_errors = 0;
    long long max_frames = 10'000'000;
    std::uint64_t seed = 1;
    int workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    std::string out_path;
    std::string schedule_name = "chain";
    std::vector<std::string> compare_paths;
    double target_ber = 1e-4;
    double stop_below_ber = 0.0;
    std::string plot_path;
    std::string manifest_path;
    std::string dump_soft_path;
    bool quiet = false;

    app.add_option("--decoder", decoder_name, "Receiver: jdd, sca or qpsk");
    app.add_option("--code", code_path, "Parity-check matrix in alist format");
    app.add_option("--code-gen", code_gen_text, "Generate a regular code: n=..,wc=..,wr=..[,seed=..]");
    app.add_option("--ebno", ebno_text, "Eb/N0 grid in dB: START:STOP:STEP or a single value");
    app.add_option("--iters", iters, "Decoder iterations per frame")->capture_default_str();
    app.add_option("--min-errors", min_errors, "Bit errors to accumulate per point")->capture_default_str();
    app.add_option("--min-frame-errors", min_frame_errors,
                   "Additional frame-error target per point (0 = off)")->capture_default_str();
    app.add_option("--max-frames", max_frames, "Frame cap per point")->capture_default_str();
    app.add_option("--seed", seed, "Global seed")->capture_default_str();
    app.add_option("--workers", workers, "Worker threads")->capture_default_str();
    app.add_option("--out", out_path, "Results CSV path (default: stdout)");
    app.add_option("--schedule", schedule_name, "Joint decoder schedule: chain or flood")->capture_default_str();
    app.add_option("--compare", compare_paths, "Two result CSVs to compare")->expected(2);
    app.add_option("--target-ber", target_ber, "Target BER for --compare")->capture_default_str();
    app.add_option("--stop-below-ber", stop_below_ber,
                   "End the sweep once a point's BER drops below this (0 = off)")->capture_default_str();
    app.add_option("--emit-plot", plot_path, "Write a python plot script for the results");
    app.add_option("--from-manifest", manifest_path, "Re-run the sweep described by a manifest");
    app.add_option("--dump-soft", dump_soft_path, "Write the first frame's soft outputs (jdd only)");
    app.add_flag("--quiet", quiet, "Suppress progress output on stderr");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!compare_paths.empty()) {
            const auto curve_a = read_csv_file(compare_paths[0]);
            const auto curve_b = read_csv_file(compare_paths[1]);
            const double ea = ebno_at_ber(curve_a, target_ber);
            const double eb = ebno_at_ber(curve_b, target_ber);
            std::printf("%s: %.4f dB at BER %g\n", compare_paths[0].c_str(), ea, target_ber);
            std::printf("%s: %.4f dB at BER %g\n", compare_paths[1].c_str(), eb, target_ber);
            std::printf("gap: %.4f dB\n", ea - eb);
            if (!plot_path.empty()) {
                std::ofstream out(plot_path);
                if (!out) throw std::runtime_error("cannot write " + plot_path);
                emit_plot_script(out, {{compare_paths[0], compare_paths[0]}, {compare_paths[1], compare_paths[1]}},
                                 plot_png_name(plot_path));
            }
            return 0;
        }

        SweepConfig cfg;
        Code code = Code::uncoded(2);  // replaced below
        bool have_code = false;

        if (!manifest_path.empty()) {
            const RunManifest m = read_manifest_file(manifest_path);
            cfg = m.config;
            code = code_from_manifest(m);
            have_code = true;
        } else {
            if (decoder_name.empty())
                throw std::runtime_error("--decoder is required (or use --compare / --from-manifest)");
            if (ebno_text.empty()) throw std::runtime_error("--ebno is required");
            cfg.decoder = decoder_kind_from_string(decoder_name);
            const EbnoGrid grid = parse_ebno(ebno_text);
            cfg.ebno_start_db = grid.start;
            cfg.ebno_stop_db = grid.stop;
            cfg.ebno_step_db = grid.step;
            cfg.iterations = static_cast<int>(iters);
            cfg.min_bit_errors = min_errors;
            cfg.min_frame_errors = min_frame_errors;
            cfg.max_frames = max_frames;
            cfg.seed = seed;
            cfg.workers = workers;
            cfg.stop_below_ber = stop_below_ber;
            if (schedule_name == "chain") cfg.schedule = Schedule::chain_sweep;
            else if (schedule_name == "flood") cfg.schedule = Schedule::flooding;
            else throw std::runtime_error("--schedule must be chain or flood");

            if (!code_path.empty() && !code_gen_text.empty())
                throw std::runtime_error("give either --code or --code-gen, not both");
            if (!code_path.empty()) {
                code = Code::from_matrix(load_alist_file(code_path), Code::Source::alist, code_path);
                have_code = true;
            } else if (!code_gen_text.empty()) {
                const CodeGenSpec spec = parse_code_gen(code_gen_text);
                code = Code::generated(spec.n, spec.wc, spec.wr, spec.seed_given ? spec.seed : seed);
                have_code = true;
            }
            if (!have_code) throw std::runtime_error("a code is required: --code or --code-gen");
        }
        cfg.progress = !quiet;

        if (code.H.cols() % 2 != 0) throw std::runtime_error("codeword length must be even for QPSK symbols");

        if (!dump_soft_path.empty()) {
            if (cfg.decoder != DecoderKind::jdd)
                throw std::runtime_error("--dump-soft applies to the jdd decoder");
            RandomStream rng(cfg.seed, RandomStream::Kind::frame, 0);
            std::vector<std::uint8_t> info(static_cast<std::size_t>(code.encoder.k()));
            rng.fill_bits(info);
            const auto codeword = code.encoder.encode(info);
            const auto symbols = differential_encode(map_gray(codeword));
            const double n0 = ebno_to_n0(cfg.ebno_start_db, code.rate());
            std::vector<std::complex<double>> received;
            awgn(symbols, n0, rng, received);
            JointDecoder dec(code.H);
            dec.decode(received, n0, DecoderConfig{cfg.iterations, cfg.early_stop, cfg.schedule});
            std::ofstream out(dump_soft_path);
            if (!out) throw std::runtime_error("cannot write " + dump_soft_path);
            dec.write_soft_trace(out);
            std::cerr << "soft trace for frame 0 written to " << dump_soft_path << "\n";
        }

        const std::vector<BerPoint> points = run_sweep(cfg, code);

        if (out_path.empty()) {
            write_csv(std::cout, points);
        } else {
            write_csv_file(out_path, points);
            write_manifest_file(out_path + ".manifest.json", make_manifest(cfg, code, out_path));
            std::cerr << "wrote " << out_path << " and " << out_path << ".manifest.json\n";
        }

        if (!plot_path.empty()) {
            if (out_path.empty()) throw std::runtime_error("--emit-plot needs --out");
            std::ofstream out(plot_path);
            if (!out) throw std::runtime_error("cannot write " + plot_path);
            emit_plot_script(out, {{out_path, std::string(to_string(cfg.decoder))}}, plot_png_name(plot_path));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
