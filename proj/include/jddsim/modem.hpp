#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "jddsim/messages.hpp"
#include "jddsim/rng.hpp"

namespace jddsim {

/// QPSK symbols are integer quarter-turn indices l in {0,1,2,3} for e^{j*pi*l/2};
/// phase arithmetic stays exact and complex values appear only at the channel.
using PhaseIndex = std::uint8_t;

inline std::complex<double> constellation_point(PhaseIndex l) {
    switch (l & 3) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

/// Nearest constellation phase (decision regions are the four quadrant
/// diagonals); used by hard-decision sanity checks.
inline PhaseIndex hard_phase(std::complex<double> r) {
    if (std::abs(r.real()) >= std::abs(r.imag()))
        return r.real() >= 0.0 ? PhaseIndex{0} : PhaseIndex{2};
    return r.imag() >= 0.0 ? PhaseIndex{1} : PhaseIndex{3};
}

/// Gray-maps coded bits to phase indices, two bits per symbol: the pair
/// (c[2k], c[2k+1]) selects phase delta_index(m, n).
inline void map_gray(std::span<const std::uint8_t> bits, std::vector<PhaseIndex>& symbols) {
    if (bits.size() % 2 != 0) throw std::invalid_argument("map_gray: bit count must be even");
    symbols.resize(bits.size() / 2);
    for (std::size_t k = 0; k < symbols.size(); ++k)
        symbols[k] = static_cast<PhaseIndex>(delta_index(bits[2 * k], bits[2 * k + 1]));
}

inline std::vector<PhaseIndex> map_gray(std::span<const std::uint8_t> bits) {
    std::vector<PhaseIndex> symbols;
    map_gray(bits, symbols);
    return symbols;
}

/// d_k = d_{k-1} + s_k (mod 4) with the reference symbol d_0 = 0 outside the
/// block.
inline std::vector<PhaseIndex> differential_encode(std::span<const PhaseIndex> s) {
    std::vector<PhaseIndex> d(s.size());
    PhaseIndex prev = 0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        prev = static_cast<PhaseIndex>((prev + s[k]) & 3);
        d[k] = prev;
    }
    return d;
}

/// Inverse of differential_encode: s_k = d_k - d_{k-1} (mod 4), d_0 = 0.
inline std::vector<PhaseIndex> differential_decode(std::span<const PhaseIndex> d) {
    std::vector<PhaseIndex> s(d.size());
    PhaseIndex prev = 0;
    for (std::size_t k = 0; k < d.size(); ++k) {
        s[k] = static_cast<PhaseIndex>((4 + d[k] - prev) & 3);
        prev = d[k];
    }
    return s;
}

/// r_k = e^{j*pi*d_k/2} + n_k with n_k complex Gaussian of total variance n0
/// (n0/2 per quadrature). Draws exactly two Gaussians per symbol, real part
/// first, so streams replay identically.
inline void awgn(std::span<const PhaseIndex> d, double n0, RandomStream& rng,
                 std::vector<std::complex<double>>& received) {
    if (!(n0 > 0.0)) throw std::invalid_argument("awgn: n0 must be positive");
    const double sigma = std::sqrt(n0 / 2.0);
    received.resize(d.size());
    for (std::size_t k = 0; k < d.size(); ++k) {
        const std::complex<double> point = constellation_point(d[k]);
        const double nr = sigma * rng.next_gaussian();
        const double ni = sigma * rng.next_gaussian();
        received[k] = {point.real() + nr, point.imag() + ni};
    }
}

inline std::vector<std::complex<double>> awgn(std::span<const PhaseIndex> d, double n0, RandomStream& rng) {
    std::vector<std::complex<double>> received;
    awgn(d, n0, rng, received);
    return received;
}

/// Converts Eb/N0 in dB to the total complex noise variance N0 for
/// unit-energy symbols carrying two coded bits: N0 = 1 / (2 R 10^(dB/10)),
/// with Eb the energy per information bit and R the code rate.
inline double ebno_to_n0(double ebno_db, double rate) {
    if (!(rate > 0.0) || rate > 1.0) throw std::invalid_argument("ebno_to_n0: rate must be in (0, 1]");
    return 1.0 / (2.0 * rate * std::pow(10.0, ebno_db / 10.0));
}

/// Channel operating point; n0 is the total complex noise variance.
struct ChannelParams {
    double ebno_db = 0.0;
    double rate = 1.0;
    double n0 = 0.5;

    static ChannelParams from_ebno(double ebno_db, double rate) {
        return {ebno_db, rate, ebno_to_n0(ebno_db, rate)};
    }
};

}
