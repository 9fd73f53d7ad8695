#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "jddsim/baselines.hpp"
#include "jddsim/code_gen.hpp"
#include "jddsim/encoder.hpp"
#include "jddsim/joint_decoder.hpp"
#include "jddsim/modem.hpp"
#include "jddsim/parity_check.hpp"
#include "jddsim/rng.hpp"

namespace jddsim {

enum class DecoderKind { jdd, sca, qpsk };

inline const char* to_string(DecoderKind kind) {
    switch (kind) {
        case DecoderKind::jdd: return "jdd";
        case DecoderKind::sca: return "sca";
        default: return "qpsk";
    }
}

inline DecoderKind decoder_kind_from_string(const std::string& name) {
    if (name == "jdd") return DecoderKind::jdd;
    if (name == "sca") return DecoderKind::sca;
    if (name == "qpsk") return DecoderKind::qpsk;
    throw std::invalid_argument("unknown decoder '" + name + "' (expected jdd, sca or qpsk)");
}

/// A code ready for simulation: parity-check matrix, systematic encoder and
/// the provenance needed to rebuild it from a run manifest.
struct Code {
    enum class Source { alist, generated, uncoded };

    ParityCheckMatrix H;
    SystematicEncoder encoder;
    Source source = Source::generated;
    std::string alist_path;       // source == alist
    int gen_col_weight = 0;       // source == generated
    int gen_row_weight = 0;
    std::uint64_t gen_seed = 0;

    double rate() const { return static_cast<double>(encoder.k()) / encoder.n(); }

    static Code generated(int n, int col_weight, int row_weight, std::uint64_t seed) {
        ParityCheckMatrix H = generate_regular_code(n, col_weight, row_weight, seed);
        SystematicEncoder enc(H);
        return Code{std::move(H), std::move(enc), Source::generated, "", col_weight, row_weight, seed};
    }

    static Code from_matrix(ParityCheckMatrix H, Source source = Source::alist, std::string path = "") {
        SystematicEncoder enc(H);
        return Code{std::move(H), std::move(enc), source, std::move(path), 0, 0, 0};
    }

    static Code uncoded(int n) {
        ParityCheckMatrix H = uncoded_matrix(n);
        SystematicEncoder enc(H);
        return Code{std::move(H), std::move(enc), Source::uncoded, "", 0, 0, 0};
    }
};

struct SweepConfig {
    double ebno_start_db = 0.0;
    double ebno_stop_db = 0.0;
    double ebno_step_db = 0.25;
    long long min_bit_errors = 1000;
    long long min_frame_errors = 0;  // optional extra stopping requirement (0 = off)
    long long max_frames = 10'000'000;
    DecoderKind decoder = DecoderKind::jdd;
    int iterations = 20;
    bool early_stop = true;
    Schedule schedule = Schedule::chain_sweep;
    std::uint64_t seed = 1;
    int workers = 1;
    double stop_below_ber = 0.0;  // end the sweep once a point's BER drops below this (0 = off)
    bool progress = false;        // progress lines on stderr
};

/// Aggregated Monte Carlo statistics at one Eb/N0 point. Errors are counted
/// over information bits.
struct BerPoint {
    double ebno_db = 0.0;
    long long frames = 0;
    long long bit_errors = 0;
    long long frame_errors = 0;
    double ber = 0.0;
    double fer = 0.0;
    double avg_iterations = 0.0;
    double wall_time_s = 0.0;
    bool truncated = false;        // max_frames reached before the error target
    long long info_bits_total = 0;
};

/// 95% Wilson score interval for the BER, treating the counted information
/// bits as independent Bernoulli trials (an approximation: errors cluster
/// within frames, so the true interval is wider).
inline std::pair<double, double> confidence_interval(const BerPoint& p) {
    if (p.info_bits_total <= 0) throw std::invalid_argument("confidence_interval: no trials");
    const double z = 1.96;
    const double n = static_cast<double>(p.info_bits_total);
    const double phat = static_cast<double>(p.bit_errors) / n;
    const double z2n = z * z / n;
    const double center = (phat + z2n / 2.0) / (1.0 + z2n);
    const double half = z / (1.0 + z2n) * std::sqrt(phat * (1.0 - phat) / n + z2n / (4.0 * n));
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace detail {

struct FrameOutcome {
    int bit_errors = 0;
    int iterations = 0;
};

/// Per-worker simulation state; decoders are built once per point.
class FrameRunner {
public:
    FrameRunner(const Code& code, DecoderKind kind, const DecoderConfig& cfg)
        : code_(code), kind_(kind), cfg_(cfg) {
        switch (kind_) {
            case DecoderKind::jdd: jdd_.emplace(code.H); break;
            case DecoderKind::sca: sca_.emplace(code.H); break;
            case DecoderKind::qpsk: qpsk_.emplace(code.H); break;
        }
        info_.resize(static_cast<std::size_t>(code.encoder.k()));
        decoded_info_.resize(static_cast<std::size_t>(code.encoder.k()));
        codeword_.resize(static_cast<std::size_t>(code.encoder.n()));
    }

    FrameOutcome run(std::uint64_t seed, long long frame_index, double n0) {
        RandomStream rng(seed, RandomStream::Kind::frame, static_cast<std::uint64_t>(frame_index));
        rng.fill_bits(info_);
        code_.encoder.encode(info_, codeword_);
        map_gray(codeword_, symbols_);
        if (kind_ != DecoderKind::qpsk) symbols_ = differential_encode(symbols_);
        awgn(symbols_, n0, rng, received_);

        DecodeResult res;
        switch (kind_) {
            case DecoderKind::jdd: res = jdd_->decode(received_, n0, cfg_); break;
            case DecoderKind::sca: res = sca_->decode(received_, n0, cfg_); break;
            case DecoderKind::qpsk: res = qpsk_->decode(received_, n0, cfg_); break;
        }
        code_.encoder.extract_info(res.hard_bits, decoded_info_);
        FrameOutcome out;
        out.iterations = res.iterations_used;
        for (std::size_t t = 0; t < info_.size(); ++t)
            out.bit_errors += info_[t] != decoded_info_[t];
        return out;
    }

private:
    const Code& code_;
    DecoderKind kind_;
    DecoderConfig cfg_;
    std::optional<JointDecoder> jdd_;
    std::optional<ScaDecoder> sca_;
    std::optional<QpskDecoder> qpsk_;
    std::vector<std::uint8_t> info_;
    std::vector<std::uint8_t> decoded_info_;
    std::vector<std::uint8_t> codeword_;
    std::vector<PhaseIndex> symbols_;
    std::vector<std::complex<double>> received_;
};

}  // namespace detail

/// Simulates one Eb/N0 point until min_bit_errors (and min_frame_errors, if
/// set) accumulate or max_frames is reached. Frames are processed in blocks;
/// within a block workers pick frames from a shared counter, and the stopping
/// rule is applied to the per-frame results in frame order, so the reported
/// counts depend only on (seed, frame_index) and never on scheduling or the
/// worker count.
inline BerPoint run_point(const SweepConfig& cfg, double ebno_db, const Code& code) {
    if (cfg.min_bit_errors < 1) throw std::invalid_argument("min_bit_errors must be >= 1");
    if (cfg.max_frames < 1) throw std::invalid_argument("max_frames must be >= 1");
    if (cfg.workers < 1) throw std::invalid_argument("workers must be >= 1");
    if (code.encoder.k() <= 0) throw std::invalid_argument("code has no information bits");

    const double n0 = ebno_to_n0(ebno_db, code.rate());
    DecoderConfig dec_cfg{cfg.iterations, cfg.early_stop, cfg.schedule};
    const auto t0 = std::chrono::steady_clock::now();

    BerPoint point;
    point.ebno_db = ebno_db;

    std::vector<std::unique_ptr<detail::FrameRunner>> runners;
    for (int w = 0; w < cfg.workers; ++w)
        runners.push_back(std::make_unique<detail::FrameRunner>(code, cfg.decoder, dec_cfg));

    long long next_frame = 0;
    long long iter_total = 0;
    bool done = false;
    std::vector<detail::FrameOutcome> block;
    for (int block_index = 0; !done; ++block_index) {
        long long block_size = std::min<long long>(1024, 32LL << std::min(block_index, 5));
        block_size = std::min(block_size, cfg.max_frames - next_frame);
        if (block_size <= 0) break;
        block.assign(static_cast<std::size_t>(block_size), {});

        std::atomic<long long> cursor{0};
        auto work = [&](int worker) {
            for (;;) {
                const long long i = cursor.fetch_add(1);
                if (i >= block_size) break;
                block[static_cast<std::size_t>(i)] = runners[static_cast<std::size_t>(worker)]->run(
                    cfg.seed, next_frame + i, n0);
            }
        };
        if (cfg.workers == 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < cfg.workers; ++w) pool.emplace_back(work, w);
            for (auto& t : pool) t.join();
        }

        // Apply the stopping rule in frame order.
        for (long long i = 0; i < block_size && !done; ++i) {
            const auto& f = block[static_cast<std::size_t>(i)];
            point.frames += 1;
            point.bit_errors += f.bit_errors;
            point.frame_errors += f.bit_errors > 0 ? 1 : 0;
            iter_total += f.iterations;
            if (point.bit_errors >= cfg.min_bit_errors &&
                (cfg.min_frame_errors == 0 || point.frame_errors >= cfg.min_frame_errors))
                done = true;
        }
        next_frame += block_size;
        if (!done && next_frame >= cfg.max_frames) {
            point.truncated = true;
            break;
        }
        if (cfg.progress) {
            std::cerr << to_string(cfg.decoder) << " " << ebno_db << " dB: " << point.frames << " frames, "
                      << point.bit_errors << " bit errors, ber="
                      << (static_cast<double>(point.bit_errors) /
                          (static_cast<double>(point.frames) * code.encoder.k()))
                      << (done ? " (done)\n" : "\n");
        }
    }

    point.info_bits_total = point.frames * code.encoder.k();
    point.ber = point.info_bits_total > 0 ? static_cast<double>(point.bit_errors) / static_cast<double>(point.info_bits_total) : 0.0;
    point.fer = point.frames > 0 ? static_cast<double>(point.frame_errors) / static_cast<double>(point.frames) : 0.0;
    point.avg_iterations = point.frames > 0 ? static_cast<double>(iter_total) / static_cast<double>(point.frames) : 0.0;
    point.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return point;
}

/// Runs the Eb/N0 grid defined by the config. If stop_below_ber is set, the
/// sweep ends early once a point falls below it (the point is kept).
inline std::vector<BerPoint> run_sweep(const SweepConfig& cfg, const Code& code) {
    if (cfg.ebno_step_db <= 0.0) throw std::invalid_argument("ebno_step_db must be positive");
    if (cfg.ebno_stop_db < cfg.ebno_start_db) throw std::invalid_argument("ebno grid: stop before start");
    std::vector<BerPoint> points;
    const double eps = cfg.ebno_step_db * 1e-9;
    for (double ebno = cfg.ebno_start_db; ebno <= cfg.ebno_stop_db + eps; ebno += cfg.ebno_step_db) {
        points.push_back(run_point(cfg, ebno, code));
        const auto& p = points.back();
        if (cfg.progress) {
            std::cerr << to_string(cfg.decoder) << " point done: " << p.ebno_db << " dB ber=" << p.ber
                      << " (" << p.frames << " frames, " << p.wall_time_s << " s)\n";
        }
        // Degrading with more SNR is possible but suspicious (usually too few
        // errors per point); warn, never abort.
        if (cfg.progress && points.size() >= 2) {
            const auto& prev = points[points.size() - 2];
            if (p.ber > prev.ber && !p.truncated && !prev.truncated)
                std::cerr << "warning: BER rose from " << prev.ber << " at " << prev.ebno_db << " dB to "
                          << p.ber << " at " << p.ebno_db << " dB\n";
        }
        if (cfg.stop_below_ber > 0.0 && points.back().ber < cfg.stop_below_ber) break;
    }
    return points;
}

}
