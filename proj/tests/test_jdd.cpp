#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "jddsim/code_gen.hpp"
#include "jddsim/encoder.hpp"
#include "jddsim/joint_decoder.hpp"
#include "jddsim/modem.hpp"
#include "jddsim/oracle.hpp"
#include "jddsim/rng.hpp"

using namespace jddsim;

namespace {

PhaseMessage random_phase_message(RandomStream& rng) {
    PhaseMessage m;
    for (int l = 0; l < 4; ++l) m[l] = rng.next_unit() + 1e-3;
    normalize(m);
    return m;
}

BitMessage random_bit_message(RandomStream& rng) {
    BitMessage m{rng.next_unit() + 1e-3, rng.next_unit() + 1e-3};
    normalize(m);
    return m;
}

double max_abs_diff(const PhaseMessage& a, const PhaseMessage& b) {
    double worst = 0.0;
    for (int l = 0; l < 4; ++l) worst = std::max(worst, std::abs(a[l] - b[l]));
    return worst;
}

std::vector<std::complex<double>> noise_free(const std::vector<PhaseIndex>& d) {
    std::vector<std::complex<double>> r(d.size());
    for (std::size_t k = 0; k < d.size(); ++k) r[k] = constellation_point(d[k]);
    return r;
}

}  // namespace

TEST_CASE("channel message: on-axis sample") {
    const PhaseMessage q = channel_message({1.0, 0.0}, 1.0);
    REQUIRE(q.argmax() == 0);
    // Squared distances from (1,0) are 0, 2, 4, 2.
    REQUIRE(q[2] / q[0] == Catch::Approx(std::exp(-4.0)).epsilon(1e-12));
    REQUIRE(q[1] / q[0] == Catch::Approx(std::exp(-2.0)).epsilon(1e-12));
    REQUIRE(q[1] == Catch::Approx(q[3]).epsilon(1e-12));
}

TEST_CASE("channel message: equidistant and diagonal samples") {
    const PhaseMessage center = channel_message({0.0, 0.0}, 0.7);
    for (int l = 0; l < 4; ++l) REQUIRE(center[l] == Catch::Approx(0.25).epsilon(1e-12));

    const PhaseMessage diag = channel_message({0.9, 0.9}, 0.5);
    REQUIRE(diag[0] == Catch::Approx(diag[1]).epsilon(1e-12));
    REQUIRE(diag[2] == Catch::Approx(diag[3]).epsilon(1e-12));
}

TEST_CASE("channel message: survives vanishing noise via max subtraction") {
    const PhaseMessage q = channel_message({0.1, 0.9}, 1e-12);
    REQUIRE(q.argmax() == 1);
    REQUIRE(q[1] == Catch::Approx(1.0).epsilon(1e-9));
    for (int l = 0; l < 4; ++l) REQUIRE(std::isfinite(q[l]));
}

TEST_CASE("channel message: quarter-turn rotation shifts the message cyclically") {
    RandomStream rng(5, RandomStream::Kind::frame, 0);
    const std::complex<double> j{0.0, 1.0};
    for (int trial = 0; trial < 200; ++trial) {
        const std::complex<double> r{4.0 * rng.next_unit() - 2.0, 4.0 * rng.next_unit() - 2.0};
        const double n0 = 0.1 + rng.next_unit();
        const PhaseMessage base = channel_message(r, n0);
        const PhaseMessage rotated = channel_message(r * j, n0);
        for (int l = 0; l < 4; ++l) REQUIRE(rotated[l] == Catch::Approx(base[(l - 1) & 3]).margin(1e-12));
    }
}

TEST_CASE("psi_to_symbol: uniform bits spread any symbol belief uniformly") {
    const PhaseMessage out = psi_to_symbol(BitMessage::uniform(), BitMessage::uniform(), PhaseMessage::delta(0),
                                           PsiDirection::to_current);
    for (int l = 0; l < 4; ++l) REQUIRE(out[l] == Catch::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("psi_to_symbol: deterministic constraint propagation") {
    // Bits (m=1, n=0) force a quarter-turn step.
    const BitMessage m1 = BitMessage::delta(1);
    const BitMessage n0 = BitMessage::delta(0);

    const PhaseMessage fwd = psi_to_symbol(m1, n0, PhaseMessage::delta(1), PsiDirection::to_current);
    REQUIRE(fwd[2] == Catch::Approx(1.0).epsilon(1e-12));  // 1 + 1 mod 4

    // Toward the earlier symbol the constraint inverts: d_{k-1} = d_k - delta.
    const PhaseMessage bwd = psi_to_symbol(m1, n0, PhaseMessage::delta(2), PsiDirection::to_previous);
    REQUIRE(bwd[1] == Catch::Approx(1.0).epsilon(1e-12));  // 2 - 1 mod 4
    const PhaseMessage ref = oracle::exact_psi_symbol_marginal(PhaseMessage::uniform(), PhaseMessage::delta(2), m1,
                                                               n0, oracle::PsiEdge::prev_symbol);
    REQUIRE(max_abs_diff(bwd, ref) < 1e-12);
}

TEST_CASE("psi_to_symbol: matches the factor enumeration on random input") {
    RandomStream rng(7, RandomStream::Kind::frame, 0);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const PhaseMessage d_prev = random_phase_message(rng);
        const PhaseMessage d_curr = random_phase_message(rng);
        const BitMessage first = random_bit_message(rng);
        const BitMessage second = random_bit_message(rng);
        worst = std::max(worst, max_abs_diff(psi_to_symbol(first, second, d_prev, PsiDirection::to_current),
                                             oracle::exact_psi_symbol_marginal(d_prev, d_curr, first, second,
                                                                               oracle::PsiEdge::curr_symbol)));
        worst = std::max(worst, max_abs_diff(psi_to_symbol(first, second, d_curr, PsiDirection::to_previous),
                                             oracle::exact_psi_symbol_marginal(d_prev, d_curr, first, second,
                                                                               oracle::PsiEdge::prev_symbol)));
    }
    REQUIRE(worst < 1e-12);
}

TEST_CASE("psi_to_bit: deterministic constraint singles out one bit value") {
    const BitMessage out = psi_to_bit(BitMessage::uniform(), PhaseMessage::delta(0), PhaseMessage::delta(2),
                                      PsiBitTarget::second_bit);
    REQUIRE(out.p1 == Catch::Approx(1.0).epsilon(1e-12));  // step 2 needs (m,n) = (1,1)

    // Uniform symbol beliefs carry no information, whatever the other bit says.
    const BitMessage both_uniform = psi_to_bit(BitMessage{0.9, 0.1}, PhaseMessage::uniform(),
                                               PhaseMessage::uniform(), PsiBitTarget::first_bit);
    REQUIRE(both_uniform.p0 == Catch::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("psi_to_bit: matches the factor enumeration on random input") {
    RandomStream rng(9, RandomStream::Kind::frame, 0);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const PhaseMessage d_prev = random_phase_message(rng);
        const PhaseMessage d_curr = random_phase_message(rng);
        const BitMessage first = random_bit_message(rng);
        const BitMessage second = random_bit_message(rng);
        const BitMessage to_first = psi_to_bit(second, d_prev, d_curr, PsiBitTarget::first_bit);
        const BitMessage ref_first =
            oracle::exact_psi_bit_marginal(d_prev, d_curr, first, second, oracle::PsiEdge::first_bit);
        const BitMessage to_second = psi_to_bit(first, d_prev, d_curr, PsiBitTarget::second_bit);
        const BitMessage ref_second =
            oracle::exact_psi_bit_marginal(d_prev, d_curr, first, second, oracle::PsiEdge::second_bit);
        worst = std::max({worst, std::abs(to_first.p0 - ref_first.p0), std::abs(to_first.p1 - ref_first.p1),
                          std::abs(to_second.p0 - ref_second.p0), std::abs(to_second.p1 - ref_second.p1)});
    }
    REQUIRE(worst < 1e-12);
}

TEST_CASE("symbol variable update: uniform neighbor passes the channel message through") {
    const PhaseMessage rho{{0.4, 0.3, 0.2, 0.1}};
    const PhaseMessage uniform = PhaseMessage::uniform();
    const SymbolVarUpdate u = symbol_variable_update(rho, nullptr, &uniform);
    for (int l = 0; l < 4; ++l) REQUIRE(u.to_left[l] == Catch::Approx(rho[l]).epsilon(1e-12));

    const PhaseMessage left = PhaseMessage::delta(1);
    const PhaseMessage rho_d = PhaseMessage::delta(1);
    const SymbolVarUpdate v = symbol_variable_update(rho_d, &left, nullptr);
    REQUIRE(v.app[1] == Catch::Approx(1.0).epsilon(1e-12));
    REQUIRE(v.fallbacks == 0);

    const PhaseMessage conflict = PhaseMessage::delta(2);
    const SymbolVarUpdate w = symbol_variable_update(rho_d, &conflict, nullptr);
    REQUIRE(w.fallbacks > 0);
    for (int l = 0; l < 4; ++l) REQUIRE(w.app[l] == Catch::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("decode: noise-free input converges in one iteration") {
    const ParityCheckMatrix H = generate_regular_code(48, 3, 12, 3);
    const SystematicEncoder enc(H);
    RandomStream rng(1, RandomStream::Kind::frame, 0);
    std::vector<std::uint8_t> info(static_cast<std::size_t>(enc.k()));
    rng.fill_bits(info);
    const auto cw = enc.encode(info);
    const auto d = differential_encode(map_gray(cw));

    JointDecoder dec(H);
    const DecodeResult res = dec.decode(noise_free(d), 1e-6, DecoderConfig{});
    REQUIRE(res.converged);
    REQUIRE(res.iterations_used == 1);
    REQUIRE(res.hard_bits == cw);
}

TEST_CASE("decode: with no parity checks one sweep is exact on the chain") {
    oracle::TinyInstance inst{uncoded_matrix(12), {}, 0.9};
    RandomStream rng(21, RandomStream::Kind::frame, 4);
    std::vector<PhaseIndex> d(6);
    for (auto& v : d) v = static_cast<PhaseIndex>(rng.next_below(4));
    awgn(d, inst.n0, rng, inst.received);

    JointDecoder dec(inst.H);
    DecoderConfig cfg;
    cfg.max_iterations = 1;
    dec.decode(inst.received, inst.n0, cfg);

    const auto exact_bits = oracle::exact_bit_posteriors(inst);
    const auto app = dec.bit_app();
    for (int j = 0; j < 12; ++j) {
        REQUIRE(std::abs(app[static_cast<std::size_t>(j)].p0 - exact_bits[static_cast<std::size_t>(j)].p0) < 1e-9);
        REQUIRE(std::abs(app[static_cast<std::size_t>(j)].p1 - exact_bits[static_cast<std::size_t>(j)].p1) < 1e-9);
    }

    const auto exact_symbols = oracle::exact_symbol_posteriors(inst);
    for (int k = 0; k < 6; ++k)
        REQUIRE(max_abs_diff(dec.symbol_app(k), exact_symbols[static_cast<std::size_t>(k)]) < 1e-9);
}

TEST_CASE("decode: flooding schedule reaches the chain marginals after enough iterations") {
    oracle::TinyInstance inst{uncoded_matrix(8), {}, 1.1};
    RandomStream rng(33, RandomStream::Kind::frame, 2);
    std::vector<PhaseIndex> d(4);
    for (auto& v : d) v = static_cast<PhaseIndex>(rng.next_below(4));
    awgn(d, inst.n0, rng, inst.received);

    JointDecoder dec(inst.H);
    DecoderConfig cfg;
    cfg.schedule = Schedule::flooding;
    cfg.max_iterations = 12;  // > chain diameter, messages have settled
    cfg.early_stop = false;
    dec.decode(inst.received, inst.n0, cfg);

    const auto exact_bits = oracle::exact_bit_posteriors(inst);
    const auto app = dec.bit_app();
    for (int j = 0; j < 8; ++j)
        REQUIRE(std::abs(app[static_cast<std::size_t>(j)].p1 - exact_bits[static_cast<std::size_t>(j)].p1) < 1e-9);
}

TEST_CASE("decode: flooding converges on noise-free frames too") {
    const ParityCheckMatrix H = generate_regular_code(24, 3, 12, 8);
    const SystematicEncoder enc(H);
    std::vector<std::uint8_t> info(static_cast<std::size_t>(enc.k()), 1);
    const auto cw = enc.encode(info);
    const auto d = differential_encode(map_gray(cw));
    JointDecoder dec(H);
    DecoderConfig cfg;
    cfg.schedule = Schedule::flooding;
    const DecodeResult res = dec.decode(noise_free(d), 1e-6, cfg);
    REQUIRE(res.converged);
    REQUIRE(res.hard_bits == cw);
}

TEST_CASE("decode: hard decisions track the bitwise MAP on a tiny code") {
    // High-noise channel; compare against exhaustive bitwise MAP where the
    // posterior is unambiguous.
    const ParityCheckMatrix H = generate_regular_code(12, 2, 8, 2);
    const SystematicEncoder enc(H);
    JointDecoder dec(H);
    DecoderConfig cfg;

    long long agree = 0, total = 0;
    for (int trial = 0; trial < 120; ++trial) {
        RandomStream rng(100, RandomStream::Kind::frame, static_cast<std::uint64_t>(trial));
        std::vector<std::uint8_t> info(static_cast<std::size_t>(enc.k()));
        rng.fill_bits(info);
        const auto cw = enc.encode(info);
        const auto d = differential_encode(map_gray(cw));
        oracle::TinyInstance inst{H, {}, ebno_to_n0(1.0, enc.k() / static_cast<double>(enc.n()))};
        awgn(d, inst.n0, rng, inst.received);

        const DecodeResult res = dec.decode(inst.received, inst.n0, cfg);
        const auto exact = oracle::exact_bit_posteriors(inst);
        for (int j = 0; j < H.cols(); ++j) {
            const auto& post = exact[static_cast<std::size_t>(j)];
            if (std::abs(post.p1 - post.p0) <= 1e-3) continue;  // ambiguous, skip
            ++total;
            agree += res.hard_bits[static_cast<std::size_t>(j)] == (post.p1 > post.p0 ? 1 : 0);
        }
    }
    REQUIRE(total > 500);
    REQUIRE(static_cast<double>(agree) / static_cast<double>(total) >= 0.95);
}

TEST_CASE("decode: early stop bounds iterations and reports them") {
    const ParityCheckMatrix H = generate_regular_code(120, 3, 12, 4);
    const SystematicEncoder enc(H);
    JointDecoder dec(H);
    for (int trial = 0; trial < 10; ++trial) {
        RandomStream rng(55, RandomStream::Kind::frame, static_cast<std::uint64_t>(trial));
        std::vector<std::uint8_t> info(static_cast<std::size_t>(enc.k()));
        rng.fill_bits(info);
        const auto cw = enc.encode(info);
        const auto d = differential_encode(map_gray(cw));
        const double n0 = ebno_to_n0(6.0, enc.k() / static_cast<double>(enc.n()));
        std::vector<std::complex<double>> r;
        awgn(d, n0, rng, r);
        const DecodeResult res = dec.decode(r, n0, DecoderConfig{});
        REQUIRE(res.iterations_used >= 1);
        REQUIRE(res.iterations_used <= 20);
        if (res.converged) {
            // converged implies the returned word passes every parity check
            REQUIRE(H.syndrome_ok(res.hard_bits));
        }
    }
}

TEST_CASE("decode: every exposed belief is normalized") {
    const ParityCheckMatrix H = generate_regular_code(60, 3, 12, 6);
    const SystematicEncoder enc(H);
    RandomStream rng(77, RandomStream::Kind::frame, 0);
    std::vector<std::uint8_t> info(static_cast<std::size_t>(enc.k()));
    rng.fill_bits(info);
    const auto d = differential_encode(map_gray(enc.encode(info)));
    const double n0 = ebno_to_n0(2.0, enc.k() / static_cast<double>(enc.n()));
    std::vector<std::complex<double>> r;
    awgn(d, n0, rng, r);

    JointDecoder dec(H);
    DecoderConfig cfg;
    cfg.early_stop = false;
    dec.decode(r, n0, cfg);
    for (const auto& b : dec.bit_app()) REQUIRE(std::abs(b.p0 + b.p1 - 1.0) < 1e-9);
    for (const auto& b : dec.demapper_messages()) REQUIRE(std::abs(b.p0 + b.p1 - 1.0) < 1e-9);
    for (int k = 0; k < dec.chain_length(); ++k) {
        const PhaseMessage app = dec.symbol_app(k);
        REQUIRE(std::abs(app[0] + app[1] + app[2] + app[3] - 1.0) < 1e-9);
    }
}

TEST_CASE("decode: single-symbol block matches the hand posterior") {
    // One symbol, no code: P(c1, c2 | r) follows the channel message through
    // the Gray map with the reference symbol pinned at phase 0.
    oracle::TinyInstance inst{uncoded_matrix(2), {{0.6, 0.7}}, 0.8};
    JointDecoder dec(inst.H);
    DecoderConfig cfg;
    cfg.max_iterations = 1;
    dec.decode(inst.received, inst.n0, cfg);

    const PhaseMessage q = channel_message(inst.received[0], inst.n0);
    const auto app = dec.bit_app();
    // first bit: P(m=1) = q(delta(1,0)) + q(delta(1,1))
    REQUIRE(app[0].p1 == Catch::Approx(q[1] + q[2]).epsilon(1e-9));
    // second bit: P(n=1) = q(delta(1,1)) + q(delta(0,1))
    REQUIRE(app[1].p1 == Catch::Approx(q[2] + q[3]).epsilon(1e-9));

    const auto exact = oracle::exact_bit_posteriors(inst);
    REQUIRE(std::abs(app[0].p1 - exact[0].p1) < 1e-9);
    REQUIRE(std::abs(app[1].p1 - exact[1].p1) < 1e-9);
}

TEST_CASE("decode: uniform channel gives uniform bit posteriors") {
    oracle::TinyInstance inst{uncoded_matrix(8), {{0, 0}, {0, 0}, {0, 0}, {0, 0}}, 1.0};
    JointDecoder dec(inst.H);
    DecoderConfig cfg;
    cfg.max_iterations = 1;
    dec.decode(inst.received, inst.n0, cfg);
    for (const auto& b : dec.bit_app()) REQUIRE(b.p1 == Catch::Approx(0.5).margin(1e-9));
}

TEST_CASE("decode: rejects mismatched block lengths and odd codes") {
    const ParityCheckMatrix H = generate_regular_code(24, 3, 12, 1);
    JointDecoder dec(H);
    std::vector<std::complex<double>> wrong(5);
    REQUIRE_THROWS_AS(dec.decode(wrong, 0.5, DecoderConfig{}), std::invalid_argument);

    const ParityCheckMatrix odd(3, {{0, 1, 2}});
    REQUIRE_THROWS_AS(JointDecoder(odd), std::invalid_argument);
}
