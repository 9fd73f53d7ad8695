// Minimal library walkthrough: build a small rate-5/6 code and compare the
// three receivers at one operating point.
#include <cstdio>

#include "jddsim/jddsim.hpp"

int main() {
    using namespace jddsim;

    const Code code = Code::generated(/*n=*/1200, /*col_weight=*/3, /*row_weight=*/18, /*seed=*/42);
    std::printf("code: N=%d K=%d rate=%.4f fingerprint=%s\n", code.H.cols(), code.encoder.k(), code.rate(),
                fingerprint_hex(code.H).c_str());

    SweepConfig cfg;
    cfg.ebno_start_db = cfg.ebno_stop_db = 4.5;
    cfg.min_bit_errors = 200;
    cfg.max_frames = 20000;
    cfg.iterations = 20;
    cfg.seed = 7;
    cfg.workers = 2;

    std::printf("%-6s %10s %10s %8s %8s\n", "rx", "ber", "fer", "frames", "avg_it");
    for (DecoderKind kind : {DecoderKind::qpsk, DecoderKind::jdd, DecoderKind::sca}) {
        cfg.decoder = kind;
        const BerPoint p = run_point(cfg, cfg.ebno_start_db, code);
        std::printf("%-6s %10.3e %10.3e %8lld %8.2f\n", to_string(kind), p.ber, p.fer, p.frames,
                    p.avg_iterations);
    }
    return 0;
}
