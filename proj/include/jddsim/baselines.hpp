#pragma once

#include <complex>
#include <span>
#include <vector>

#include "jddsim/joint_decoder.hpp"
#include "jddsim/messages.hpp"
#include "jddsim/parity_check.hpp"
#include "jddsim/spa.hpp"

namespace jddsim {

/// One-shot soft DQPSK demapper: the exact pairwise posterior of each
/// transition phase given the two received samples that straddle it,
///   P(s_k = delta | r_{k-1}, r_k) prop. sum_l L_{k-1}(l) L_k((l + delta) mod 4),
/// marginalized onto the two Gray-mapped bits. The first transition uses the
/// known reference symbol (phase 0) in place of L_0. No information flows
/// back from the decoder.
inline void sca_demap(std::span<const std::complex<double>> received, double n0,
                      std::vector<BitMessage>& bits) {
    bits.resize(2 * received.size());
    PhaseMessage prev = PhaseMessage::delta(0);
    for (std::size_t k = 0; k < received.size(); ++k) {
        const PhaseMessage cur = channel_message(received[k], n0);
        double t[4];
        for (int delta = 0; delta < 4; ++delta) {
            double acc = 0.0;
            for (int l = 0; l < 4; ++l) acc += prev[l] * cur[(l + delta) & 3];
            t[delta] = acc;
        }
        BitMessage first{t[delta_index(0, 0)] + t[delta_index(0, 1)],
                         t[delta_index(1, 0)] + t[delta_index(1, 1)]};
        BitMessage second{t[delta_index(0, 0)] + t[delta_index(1, 0)],
                          t[delta_index(0, 1)] + t[delta_index(1, 1)]};
        normalize(first);
        normalize(second);
        bits[2 * k] = first;
        bits[2 * k + 1] = second;
        prev = cur;
    }
}

inline std::vector<BitMessage> sca_demap(std::span<const std::complex<double>> received, double n0) {
    std::vector<BitMessage> bits;
    sca_demap(received, n0, bits);
    return bits;
}

/// Optimal coherent QPSK demapper (non-differential transmission, d = s):
/// exact per-bit marginals of the four-point symbol posterior.
inline void qpsk_optimal_demap(std::span<const std::complex<double>> received, double n0,
                               std::vector<BitMessage>& bits) {
    bits.resize(2 * received.size());
    for (std::size_t k = 0; k < received.size(); ++k) {
        const PhaseMessage q = channel_message(received[k], n0);
        BitMessage first{q[delta_index(0, 0)] + q[delta_index(0, 1)],
                         q[delta_index(1, 0)] + q[delta_index(1, 1)]};
        BitMessage second{q[delta_index(0, 0)] + q[delta_index(1, 0)],
                          q[delta_index(0, 1)] + q[delta_index(1, 1)]};
        normalize(first);
        normalize(second);
        bits[2 * k] = first;
        bits[2 * k + 1] = second;
    }
}

inline std::vector<BitMessage> qpsk_optimal_demap(std::span<const std::complex<double>> received, double n0) {
    std::vector<BitMessage> bits;
    qpsk_optimal_demap(received, n0, bits);
    return bits;
}

/// Serial concatenated receiver: soft DQPSK demap once, then iterate the
/// LDPC sum-product decoder against those fixed priors.
class ScaDecoder {
public:
    explicit ScaDecoder(const ParityCheckMatrix& H) : core_(H) {
        if (H.cols() % 2 != 0) throw std::invalid_argument("sca decoder: codeword length must be even");
    }

    DecodeResult decode(std::span<const std::complex<double>> received, double n0, const DecoderConfig& cfg) {
        if (received.size() * 2 != static_cast<std::size_t>(core_.cols()))
            throw std::invalid_argument("sca decoder: received block length mismatch");
        sca_demap(received, n0, priors_);
        return decode_with_priors(core_, priors_, cfg);
    }

    std::span<const BitMessage> demapper_output() const { return priors_; }

private:
    LdpcCore core_;
    std::vector<BitMessage> priors_;
};

/// Coherent QPSK receiver: optimal demap, then the same LDPC decoder.
class QpskDecoder {
public:
    explicit QpskDecoder(const ParityCheckMatrix& H) : core_(H) {
        if (H.cols() % 2 != 0) throw std::invalid_argument("qpsk decoder: codeword length must be even");
    }

    DecodeResult decode(std::span<const std::complex<double>> received, double n0, const DecoderConfig& cfg) {
        if (received.size() * 2 != static_cast<std::size_t>(core_.cols()))
            throw std::invalid_argument("qpsk decoder: received block length mismatch");
        qpsk_optimal_demap(received, n0, priors_);
        return decode_with_priors(core_, priors_, cfg);
    }

    std::span<const BitMessage> demapper_output() const { return priors_; }

private:
    LdpcCore core_;
    std::vector<BitMessage> priors_;
};

}
