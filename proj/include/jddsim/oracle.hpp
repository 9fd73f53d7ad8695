#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "jddsim/messages.hpp"
#include "jddsim/modem.hpp"
#include "jddsim/parity_check.hpp"

namespace jddsim::oracle {

/// A problem small enough for exhaustive enumeration over all 2^N words.
struct TinyInstance {
    ParityCheckMatrix H;
    std::vector<std::complex<double>> received;
    double n0 = 1.0;
};

namespace detail {

inline void check_tiny(const TinyInstance& inst) {
    if (inst.H.cols() > 16) throw std::invalid_argument("oracle: instance larger than 16 bits");
    if (inst.H.cols() % 2 != 0) throw std::invalid_argument("oracle: codeword length must be even");
    if (inst.received.size() * 2 != static_cast<std::size_t>(inst.H.cols()))
        throw std::invalid_argument("oracle: received block length mismatch");
    if (!(inst.n0 > 0.0)) throw std::invalid_argument("oracle: n0 must be positive");
}

/// Log-likelihood of a word under the differential transmit chain.
inline double word_log_likelihood(const TinyInstance& inst, std::uint32_t word,
                                  std::vector<std::uint8_t>& scratch_bits) {
    const int n = inst.H.cols();
    scratch_bits.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) scratch_bits[static_cast<std::size_t>(j)] = (word >> j) & 1u;
    double ll = 0.0;
    int d = 0;
    for (int k = 0; k < n / 2; ++k) {
        const int s = delta_index(scratch_bits[static_cast<std::size_t>(2 * k)],
                                  scratch_bits[static_cast<std::size_t>(2 * k + 1)]);
        d = (d + s) & 3;
        const std::complex<double> diff =
            inst.received[static_cast<std::size_t>(k)] - constellation_point(static_cast<PhaseIndex>(d));
        ll -= std::norm(diff) / inst.n0;
    }
    return ll;
}

}  // namespace detail

/// Exact per-bit posteriors P(c_j | r) by enumerating every word, keeping the
/// zero-syndrome ones, and weighting each by the channel likelihood of its
/// differentially encoded symbol sequence.
inline std::vector<BitMessage> exact_bit_posteriors(const TinyInstance& inst) {
    detail::check_tiny(inst);
    const int n = inst.H.cols();
    const std::uint32_t count = 1u << n;
    std::vector<std::uint8_t> bits;
    std::vector<std::uint32_t> words;
    std::vector<double> lls;
    double ll_max = -1e300;
    for (std::uint32_t w = 0; w < count; ++w) {
        bits.resize(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) bits[static_cast<std::size_t>(j)] = (w >> j) & 1u;
        if (!inst.H.syndrome_ok(bits)) continue;
        const double ll = detail::word_log_likelihood(inst, w, bits);
        words.push_back(w);
        lls.push_back(ll);
        ll_max = std::max(ll_max, ll);
    }
    if (words.empty()) throw std::runtime_error("oracle: matrix has no codewords");

    std::vector<double> marg1(static_cast<std::size_t>(n), 0.0);
    double total = 0.0;
    for (std::size_t t = 0; t < words.size(); ++t) {
        const double weight = std::exp(lls[t] - ll_max);
        total += weight;
        for (int j = 0; j < n; ++j)
            if ((words[t] >> j) & 1u) marg1[static_cast<std::size_t>(j)] += weight;
    }
    std::vector<BitMessage> out(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double p1 = marg1[static_cast<std::size_t>(j)] / total;
        out[static_cast<std::size_t>(j)] = BitMessage{1.0 - p1, p1};
    }
    return out;
}

/// Exact posteriors over each transmitted symbol phase, same enumeration.
inline std::vector<PhaseMessage> exact_symbol_posteriors(const TinyInstance& inst) {
    detail::check_tiny(inst);
    const int n = inst.H.cols();
    const int half = n / 2;
    const std::uint32_t count = 1u << n;
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
    std::vector<std::array<double, 4>> marg(static_cast<std::size_t>(half), {0.0, 0.0, 0.0, 0.0});
    double total = 0.0;

    // Two passes: find the max log-likelihood, then accumulate.
    double ll_max = -1e300;
    for (std::uint32_t w = 0; w < count; ++w) {
        for (int j = 0; j < n; ++j) bits[static_cast<std::size_t>(j)] = (w >> j) & 1u;
        if (!inst.H.syndrome_ok(bits)) continue;
        ll_max = std::max(ll_max, detail::word_log_likelihood(inst, w, bits));
    }
    for (std::uint32_t w = 0; w < count; ++w) {
        for (int j = 0; j < n; ++j) bits[static_cast<std::size_t>(j)] = (w >> j) & 1u;
        if (!inst.H.syndrome_ok(bits)) continue;
        const double weight = std::exp(detail::word_log_likelihood(inst, w, bits) - ll_max);
        total += weight;
        int d = 0;
        for (int k = 0; k < half; ++k) {
            const int s = delta_index(bits[static_cast<std::size_t>(2 * k)], bits[static_cast<std::size_t>(2 * k + 1)]);
            d = (d + s) & 3;
            marg[static_cast<std::size_t>(k)][static_cast<std::size_t>(d)] += weight;
        }
    }
    std::vector<PhaseMessage> out(static_cast<std::size_t>(half));
    for (int k = 0; k < half; ++k) {
        PhaseMessage m;
        for (int l = 0; l < 4; ++l) m[l] = marg[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] / total;
        out[static_cast<std::size_t>(k)] = m;
    }
    return out;
}

enum class PsiEdge { prev_symbol, curr_symbol, first_bit, second_bit };

namespace detail {

/// Sums the merged mapping/differential factor over all 4*4*2*2 = 64 variable
/// configurations; the factor is the indicator of d_curr = d_prev + delta(m,n).
/// The target edge's incoming message is excluded from the weight.
template <typename Acc>
inline void enumerate_psi(const PhaseMessage& d_prev, const PhaseMessage& d_curr, const BitMessage& first,
                          const BitMessage& second, PsiEdge target, Acc&& accumulate) {
    for (int lp = 0; lp < 4; ++lp) {
        for (int lc = 0; lc < 4; ++lc) {
            for (int m = 0; m < 2; ++m) {
                for (int nb = 0; nb < 2; ++nb) {
                    if (lc != ((lp + delta_index(m, nb)) & 3)) continue;
                    double w = 1.0;
                    if (target != PsiEdge::prev_symbol) w *= d_prev[lp];
                    if (target != PsiEdge::curr_symbol) w *= d_curr[lc];
                    if (target != PsiEdge::first_bit) w *= first[m];
                    if (target != PsiEdge::second_bit) w *= second[nb];
                    accumulate(lp, lc, m, nb, w);
                }
            }
        }
    }
}

}  // namespace detail

/// Brute-force marginal of the merged factor onto one of its symbol edges.
inline PhaseMessage exact_psi_symbol_marginal(const PhaseMessage& d_prev, const PhaseMessage& d_curr,
                                              const BitMessage& first, const BitMessage& second, PsiEdge target) {
    if (target != PsiEdge::prev_symbol && target != PsiEdge::curr_symbol)
        throw std::invalid_argument("exact_psi_symbol_marginal: target must be a symbol edge");
    PhaseMessage out;
    out.q = {0.0, 0.0, 0.0, 0.0};
    detail::enumerate_psi(d_prev, d_curr, first, second, target,
                          [&](int lp, int lc, int, int, double w) {
                              out[target == PsiEdge::prev_symbol ? lp : lc] += w;
                          });
    normalize(out);
    return out;
}

/// Brute-force marginal of the merged factor onto one of its bit edges.
inline BitMessage exact_psi_bit_marginal(const PhaseMessage& d_prev, const PhaseMessage& d_curr,
                                         const BitMessage& first, const BitMessage& second, PsiEdge target) {
    if (target != PsiEdge::first_bit && target != PsiEdge::second_bit)
        throw std::invalid_argument("exact_psi_bit_marginal: target must be a bit edge");
    double acc[2] = {0.0, 0.0};
    detail::enumerate_psi(d_prev, d_curr, first, second, target,
                          [&](int, int, int m, int nb, double w) {
                              acc[target == PsiEdge::first_bit ? m : nb] += w;
                          });
    BitMessage out{acc[0], acc[1]};
    normalize(out);
    return out;
}

/// Reference channel message by direct evaluation of the Gaussian density
/// (no max-subtraction); valid for moderate noise levels.
inline PhaseMessage exact_channel_message(std::complex<double> r, double n0) {
    PhaseMessage q;
    for (int l = 0; l < 4; ++l) {
        const std::complex<double> diff = r - constellation_point(static_cast<PhaseIndex>(l));
        q[l] = std::exp(-std::norm(diff) / n0);
    }
    normalize(q);
    return q;
}

/// Reference soft DQPSK demapper: enumerates the 16 (d_{k-1}, d_k) phase
/// pairs per transition and marginalizes onto the Gray-mapped bits. The
/// first transition pins d_0 to phase 0.
inline std::vector<BitMessage> exact_sca_bit_messages(std::span<const std::complex<double>> received, double n0) {
    std::vector<BitMessage> out(2 * received.size());
    for (std::size_t k = 0; k < received.size(); ++k) {
        double post[4] = {0.0, 0.0, 0.0, 0.0};
        for (int prev = 0; prev < 4; ++prev) {
            double w_prev;
            if (k == 0) {
                w_prev = (prev == 0) ? 1.0 : 0.0;
            } else {
                const std::complex<double> diff =
                    received[k - 1] - constellation_point(static_cast<PhaseIndex>(prev));
                w_prev = std::exp(-std::norm(diff) / n0);
            }
            if (w_prev == 0.0) continue;
            for (int cur = 0; cur < 4; ++cur) {
                const std::complex<double> diff = received[k] - constellation_point(static_cast<PhaseIndex>(cur));
                const double w = w_prev * std::exp(-std::norm(diff) / n0);
                post[(cur - prev) & 3] += w;
            }
        }
        double acc0[2] = {0.0, 0.0}, acc1[2] = {0.0, 0.0};
        for (int m = 0; m < 2; ++m)
            for (int nb = 0; nb < 2; ++nb) {
                acc0[m] += post[delta_index(m, nb)];
                acc1[nb] += post[delta_index(m, nb)];
            }
        BitMessage first{acc0[0], acc0[1]};
        BitMessage second{acc1[0], acc1[1]};
        normalize(first);
        normalize(second);
        out[2 * k] = first;
        out[2 * k + 1] = second;
    }
    return out;
}

/// Reference coherent QPSK demapper by four-point enumeration.
inline std::vector<BitMessage> exact_qpsk_bit_messages(std::span<const std::complex<double>> received, double n0) {
    std::vector<BitMessage> out(2 * received.size());
    for (std::size_t k = 0; k < received.size(); ++k) {
        double like[4];
        for (int l = 0; l < 4; ++l) {
            const std::complex<double> diff = received[k] - constellation_point(static_cast<PhaseIndex>(l));
            like[l] = std::exp(-std::norm(diff) / n0);
        }
        double acc0[2] = {0.0, 0.0}, acc1[2] = {0.0, 0.0};
        for (int m = 0; m < 2; ++m)
            for (int nb = 0; nb < 2; ++nb) {
                acc0[m] += like[delta_index(m, nb)];
                acc1[nb] += like[delta_index(m, nb)];
            }
        BitMessage first{acc0[0], acc0[1]};
        BitMessage second{acc1[0], acc1[1]};
        normalize(first);
        normalize(second);
        out[2 * k] = first;
        out[2 * k + 1] = second;
    }
    return out;
}

}
