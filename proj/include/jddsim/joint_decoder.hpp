#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "jddsim/messages.hpp"
#include "jddsim/modem.hpp"
#include "jddsim/parity_check.hpp"
#include "jddsim/spa.hpp"

namespace jddsim {

/// Channel factor message: q(l) proportional to exp(-|r - e^{j*pi*l/2}|^2 / n0),
/// normalized. Exponents are taken relative to their maximum so the message
/// stays well-defined at any SNR.
inline PhaseMessage channel_message(std::complex<double> r, double n0) {
    const double re = r.real(), im = r.imag();
    double d[4] = {(re - 1.0) * (re - 1.0) + im * im, re * re + (im - 1.0) * (im - 1.0),
                   (re + 1.0) * (re + 1.0) + im * im, re * re + (im + 1.0) * (im + 1.0)};
    double dmin = d[0];
    for (int l = 1; l < 4; ++l) dmin = std::min(dmin, d[l]);
    PhaseMessage q;
    for (int l = 0; l < 4; ++l) q[l] = std::exp(-(d[l] - dmin) / n0);
    normalize(q);
    return q;
}

enum class PsiDirection {
    to_current,   // message toward d_k, built from the d_{k-1} side
    to_previous,  // message toward d_{k-1}, built from the d_k side
};

enum class PsiBitTarget {
    first_bit,   // the pair's m bit, c at even offset (c_{2k-1} in 1-based terms)
    second_bit,  // the pair's n bit, c at odd offset (c_{2k})
};

/// Joint mapping/differential factor, symbol-side output. The factor encodes
/// the hard constraint d_k = d_{k-1} + delta_index(m, n) (mod 4); the output
/// marginalizes the two bit beliefs and the opposite symbol belief:
///   to_current : q(l) = sum_{m,n} p_m(m) p_n(n) d_in((l - delta) mod 4)
///   to_previous: q(l) = sum_{m,n} p_m(m) p_n(n) d_in((l + delta) mod 4)
inline PhaseMessage psi_to_symbol(const BitMessage& first_bit, const BitMessage& second_bit,
                                  const PhaseMessage& d_in, PsiDirection direction) {
    // Joint bit weight per phase step; delta_index is a bijection from bit
    // pairs onto {0,1,2,3}.
    double w[4];
    w[delta_index(0, 0)] = first_bit.p0 * second_bit.p0;
    w[delta_index(1, 0)] = first_bit.p1 * second_bit.p0;
    w[delta_index(1, 1)] = first_bit.p1 * second_bit.p1;
    w[delta_index(0, 1)] = first_bit.p0 * second_bit.p1;
    PhaseMessage out;
    for (int l = 0; l < 4; ++l) {
        double acc = 0.0;
        if (direction == PsiDirection::to_current) {
            for (int delta = 0; delta < 4; ++delta) acc += w[delta] * d_in[(l - delta) & 3];
        } else {
            for (int delta = 0; delta < 4; ++delta) acc += w[delta] * d_in[(l + delta) & 3];
        }
        out[l] = acc;
    }
    normalize(out);
    return out;
}

/// Joint mapping/differential factor, bit-side output: marginalizes both
/// symbol beliefs and the other bit of the pair under the same constraint.
inline BitMessage psi_to_bit(const BitMessage& other_bit, const PhaseMessage& d_prev_in,
                             const PhaseMessage& d_curr_in, PsiBitTarget target) {
    // t[delta] = sum_l d_prev(l) d_curr((l + delta) mod 4)
    double t[4];
    for (int delta = 0; delta < 4; ++delta) {
        double acc = 0.0;
        for (int l = 0; l < 4; ++l) acc += d_prev_in[l] * d_curr_in[(l + delta) & 3];
        t[delta] = acc;
    }
    BitMessage out{0.0, 0.0};
    if (target == PsiBitTarget::first_bit) {
        out.p0 = other_bit.p0 * t[delta_index(0, 0)] + other_bit.p1 * t[delta_index(0, 1)];
        out.p1 = other_bit.p0 * t[delta_index(1, 0)] + other_bit.p1 * t[delta_index(1, 1)];
    } else {
        out.p0 = other_bit.p0 * t[delta_index(0, 0)] + other_bit.p1 * t[delta_index(1, 0)];
        out.p1 = other_bit.p0 * t[delta_index(0, 1)] + other_bit.p1 * t[delta_index(1, 1)];
    }
    normalize(out);
    return out;
}

struct SymbolVarUpdate {
    PhaseMessage to_left;   // toward psi_k
    PhaseMessage to_right;  // toward psi_{k+1}
    PhaseMessage app;
    int fallbacks = 0;
};

/// Symbol-variable update: each output is the normalized componentwise
/// product of the channel message and the opposite-side factor message; a
/// missing neighbor (nullptr) contributes the uniform message. The app is the
/// product of all three.
inline SymbolVarUpdate symbol_variable_update(const PhaseMessage& rho, const PhaseMessage* psi_left_in,
                                              const PhaseMessage* psi_right_in) {
    static const PhaseMessage uniform = PhaseMessage::uniform();
    const PhaseMessage& left = psi_left_in ? *psi_left_in : uniform;
    const PhaseMessage& right = psi_right_in ? *psi_right_in : uniform;
    SymbolVarUpdate r;
    for (int l = 0; l < 4; ++l) {
        r.to_left[l] = rho[l] * right[l];
        r.to_right[l] = rho[l] * left[l];
        r.app[l] = rho[l] * left[l] * right[l];
    }
    if (!normalize(r.to_left)) ++r.fallbacks;
    if (!normalize(r.to_right)) ++r.fallbacks;
    if (!normalize(r.app)) ++r.fallbacks;
    return r;
}

struct JointDecoderStats {
    long long uniform_fallbacks = 0;  // vanished products replaced by uniform
};

/// Sum-product receiver over the joint factor graph: a differential-symbol
/// chain (channel factors rho_k, symbol variables d_k, merged
/// mapping/differential factors psi_k) fused with the LDPC bipartite graph.
/// Each global iteration runs one full forward/backward sweep of the chain
/// and one LDPC variable/check iteration. The reference symbol d_0 enters
/// psi_1 as a constant delta message at phase 0; the right end of the chain
/// sees a uniform message.
///
/// Graph topology is fixed by H at construction; all message buffers are per
/// instance, so independent instances may run on concurrent workers.
class JointDecoder {
public:
    explicit JointDecoder(const ParityCheckMatrix& H) : ldpc_(H), n_(H.cols()), half_(H.cols() / 2) {
        if (H.cols() % 2 != 0)
            throw std::invalid_argument("joint decoder: codeword length must be even");
        rho_.resize(static_cast<std::size_t>(half_));
        fwd_in_.resize(static_cast<std::size_t>(half_));
        bwd_in_.resize(static_cast<std::size_t>(half_));
        psi_out_fwd_.resize(static_cast<std::size_t>(half_));
        psi_out_bwd_.resize(static_cast<std::size_t>(half_));
        next_fwd_.resize(static_cast<std::size_t>(half_));
        next_bwd_.resize(static_cast<std::size_t>(half_));
        c_to_psi_.assign(static_cast<std::size_t>(n_), BitMessage::uniform());
        psi_to_c_.assign(static_cast<std::size_t>(n_), BitMessage::uniform());
        app_.assign(static_cast<std::size_t>(n_), BitMessage::uniform());
    }

    DecodeResult decode(std::span<const std::complex<double>> received, double n0, const DecoderConfig& cfg) {
        if (received.size() != static_cast<std::size_t>(half_))
            throw std::invalid_argument("joint decoder: received block length mismatch");
        if (!(n0 > 0.0)) throw std::invalid_argument("joint decoder: n0 must be positive");
        if (cfg.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");

        for (int k = 0; k < half_; ++k) rho_[static_cast<std::size_t>(k)] = channel_message(received[static_cast<std::size_t>(k)], n0);
        ldpc_.reset();
        stats_ = {};
        std::fill(c_to_psi_.begin(), c_to_psi_.end(), BitMessage::uniform());
        if (cfg.schedule == Schedule::flooding) {
            std::fill(psi_out_fwd_.begin(), psi_out_fwd_.end(), PhaseMessage::uniform());
            std::fill(psi_out_bwd_.begin(), psi_out_bwd_.end(), PhaseMessage::uniform());
        }

        DecodeResult result;
        result.hard_bits.assign(static_cast<std::size_t>(n_), 0);
        for (int it = 1; it <= cfg.max_iterations; ++it) {
            if (it > 1) ldpc_.code_side_product(c_to_psi_);
            if (cfg.schedule == Schedule::chain_sweep)
                chain_sweep();
            else
                flooding_step();
            refresh_demapper_messages();
            ldpc_.variable_update(psi_to_c_);
            ldpc_.check_update();
            ldpc_.bit_app(psi_to_c_, app_);
            for (int j = 0; j < n_; ++j)
                result.hard_bits[static_cast<std::size_t>(j)] = app_[static_cast<std::size_t>(j)].p1 > 0.5 ? 1 : 0;
            result.iterations_used = it;
            result.converged = ldpc_.syndrome_ok(result.hard_bits);
            if (result.converged && cfg.early_stop) break;
        }
        if (!cfg.early_stop) result.converged = ldpc_.syndrome_ok(result.hard_bits);
        stats_.uniform_fallbacks += ldpc_.uniform_fallbacks();
        return result;
    }

    /// Per-bit posteriors from the last decode.
    std::span<const BitMessage> bit_app() const { return app_; }

    /// Demapper-side bit messages (psi -> c) from the last sweep; before any
    /// check-node feedback these coincide with the one-shot soft demapper.
    std::span<const BitMessage> demapper_messages() const { return psi_to_c_; }

    /// Posterior over the k-th transmitted symbol phase from the last decode.
    PhaseMessage symbol_app(int k) const {
        SymbolVarUpdate u = symbol_variable_update(rho_[static_cast<std::size_t>(k)],
                                                   &psi_out_fwd_[static_cast<std::size_t>(k)],
                                                   &psi_out_bwd_[static_cast<std::size_t>(k)]);
        return u.app;
    }

    const JointDecoderStats& stats() const { return stats_; }
    int codeword_length() const { return n_; }
    int chain_length() const { return half_; }

    /// CSV trace of the last decode's beliefs: one line per symbol and per bit.
    void write_soft_trace(std::ostream& out) const {
        out << "kind,index,p0,p1,p2,p3\n";
        for (int k = 0; k < half_; ++k) {
            const PhaseMessage app = symbol_app(k);
            out << "symbol," << k << ',' << app[0] << ',' << app[1] << ',' << app[2] << ',' << app[3] << '\n';
        }
        for (int j = 0; j < n_; ++j) {
            const BitMessage& b = app_[static_cast<std::size_t>(j)];
            out << "bit," << j << ',' << b.p0 << ',' << b.p1 << ",,\n";
        }
    }

private:
    void chain_sweep() {
        PhaseMessage in = PhaseMessage::delta(0);  // d_0 is known
        for (int k = 0; k < half_; ++k) {
            const std::size_t ku = static_cast<std::size_t>(k);
            fwd_in_[ku] = in;
            psi_out_fwd_[ku] = psi_to_symbol(c_to_psi_[2 * ku], c_to_psi_[2 * ku + 1], in, PsiDirection::to_current);
            in = product(rho_[ku], psi_out_fwd_[ku]);
        }
        in = PhaseMessage::uniform();  // no factor to the right of the last symbol
        for (int k = half_; k-- > 0;) {
            const std::size_t ku = static_cast<std::size_t>(k);
            psi_out_bwd_[ku] = in;
            bwd_in_[ku] = product(rho_[ku], in);
            in = psi_to_symbol(c_to_psi_[2 * ku], c_to_psi_[2 * ku + 1], bwd_in_[ku], PsiDirection::to_previous);
        }
    }

    void flooding_step() {
        // All factor outputs advance one step simultaneously from the
        // previous iteration's outputs.
        PhaseMessage right_in = PhaseMessage::delta(0);
        for (int k = 0; k < half_; ++k) {
            const std::size_t ku = static_cast<std::size_t>(k);
            fwd_in_[ku] = right_in;
            bwd_in_[ku] = product(rho_[ku], psi_out_bwd_[ku]);
            right_in = product(rho_[ku], psi_out_fwd_[ku]);
        }
        for (int k = 0; k < half_; ++k) {
            const std::size_t ku = static_cast<std::size_t>(k);
            next_fwd_[ku] = psi_to_symbol(c_to_psi_[2 * ku], c_to_psi_[2 * ku + 1], fwd_in_[ku], PsiDirection::to_current);
            if (k > 0)
                next_bwd_[ku - 1] =
                    psi_to_symbol(c_to_psi_[2 * ku], c_to_psi_[2 * ku + 1], bwd_in_[ku], PsiDirection::to_previous);
        }
        next_bwd_[static_cast<std::size_t>(half_ - 1)] = PhaseMessage::uniform();
        psi_out_fwd_.swap(next_fwd_);
        psi_out_bwd_.swap(next_bwd_);
    }

    void refresh_demapper_messages() {
        for (int k = 0; k < half_; ++k) {
            const std::size_t ku = static_cast<std::size_t>(k);
            psi_to_c_[2 * ku] =
                psi_to_bit(c_to_psi_[2 * ku + 1], fwd_in_[ku], bwd_in_[ku], PsiBitTarget::first_bit);
            psi_to_c_[2 * ku + 1] =
                psi_to_bit(c_to_psi_[2 * ku], fwd_in_[ku], bwd_in_[ku], PsiBitTarget::second_bit);
        }
    }

    PhaseMessage product(const PhaseMessage& a, const PhaseMessage& b) {
        PhaseMessage out;
        for (int l = 0; l < 4; ++l) out[l] = a[l] * b[l];
        if (!normalize(out)) ++stats_.uniform_fallbacks;
        return out;
    }

    LdpcCore ldpc_;
    int n_ = 0;
    int half_ = 0;
    std::vector<PhaseMessage> rho_;
    std::vector<PhaseMessage> fwd_in_;       // mu_{d_{k-1} -> psi_k}
    std::vector<PhaseMessage> bwd_in_;       // mu_{d_k -> psi_k}
    std::vector<PhaseMessage> psi_out_fwd_;  // mu_{psi_k -> d_k}
    std::vector<PhaseMessage> psi_out_bwd_;  // mu_{psi_{k+1} -> d_k}
    std::vector<PhaseMessage> next_fwd_;
    std::vector<PhaseMessage> next_bwd_;
    std::vector<BitMessage> c_to_psi_;
    std::vector<BitMessage> psi_to_c_;
    std::vector<BitMessage> app_;
    JointDecoderStats stats_;
};

}
