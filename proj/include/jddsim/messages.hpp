#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace jddsim {

/// Probabilities are clamped into [kProbClamp, 1 - kProbClamp] before entering
/// products so that a single hard zero cannot poison message passing.
inline constexpr double kProbClamp = 1e-12;

inline double clamp_prob(double p) {
    if (p < kProbClamp) return kProbClamp;
    if (p > 1.0 - kProbClamp) return 1.0 - kProbClamp;
    return p;
}

/// Soft bit belief (p(0), p(1)); normalized messages sum to 1.
struct BitMessage {
    double p0 = 0.5;
    double p1 = 0.5;

    double operator[](int b) const { return b ? p1 : p0; }

    static BitMessage uniform() { return {0.5, 0.5}; }
    static BitMessage delta(int bit) {
        return bit ? BitMessage{0.0, 1.0} : BitMessage{1.0, 0.0};
    }
};

/// Normalizes in place; on zero or non-finite mass falls back to uniform and
/// returns false so callers can count the event.
inline bool normalize(BitMessage& m) {
    const double s = m.p0 + m.p1;
    if (!(s > 0.0) || !std::isfinite(s)) {
        m = BitMessage::uniform();
        return false;
    }
    m.p0 /= s;
    m.p1 /= s;
    return true;
}

/// Soft QPSK symbol belief over the four quarter-turn phases e^{j*pi*l/2},
/// indexed by l in {0,1,2,3}.
struct PhaseMessage {
    std::array<double, 4> q{0.25, 0.25, 0.25, 0.25};

    double operator[](int l) const { return q[static_cast<std::size_t>(l)]; }
    double& operator[](int l) { return q[static_cast<std::size_t>(l)]; }

    static PhaseMessage uniform() { return {}; }
    static PhaseMessage delta(int l) {
        PhaseMessage m;
        m.q = {0.0, 0.0, 0.0, 0.0};
        m.q[static_cast<std::size_t>(l & 3)] = 1.0;
        return m;
    }

    int argmax() const {
        int best = 0;
        for (int l = 1; l < 4; ++l)
            if (q[static_cast<std::size_t>(l)] > q[static_cast<std::size_t>(best)]) best = l;
        return best;
    }
};

inline bool normalize(PhaseMessage& m) {
    const double s = m.q[0] + m.q[1] + m.q[2] + m.q[3];
    if (!(s > 0.0) || !std::isfinite(s)) {
        m = PhaseMessage::uniform();
        return false;
    }
    for (double& v : m.q) v /= s;
    return true;
}

/// Gray map between a coded bit pair (m, n) and the quarter-turn phase index:
/// (0,0)->0, (1,0)->1, (1,1)->2, (0,1)->3, i.e. (m - n + 2mn) mod 4.
/// Adjacent phases differ in exactly one bit.
inline constexpr int delta_index(int m, int n) {
    constexpr int table[2][2] = {{0, 3}, {1, 2}};  // table[m][n]
    return table[m & 1][n & 1];
}

/// First bit (m) of the pair mapped to phase index l.
inline constexpr int phase_first_bit(int l) {
    constexpr int table[4] = {0, 1, 1, 0};
    return table[l & 3];
}

/// Second bit (n) of the pair mapped to phase index l.
inline constexpr int phase_second_bit(int l) {
    constexpr int table[4] = {0, 0, 1, 1};
    return table[l & 3];
}

}
