#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace jddsim {

/// Deterministic random stream keyed by (seed, kind, index).
///
/// Monte Carlo frames key their stream by frame index, never by worker id,
/// so aggregated results do not depend on the degree of parallelism.
/// Gaussian and bounded-integer draws are implemented explicitly on top of
/// std::mt19937_64 (whose output sequence the standard pins down);
/// std::normal_distribution and friends are not portable across standard
/// library implementations.
class RandomStream {
public:
    enum class Kind : std::uint32_t { code_gen = 0x0c0de, frame = 0xf7a3e };

    RandomStream(std::uint64_t seed, Kind kind, std::uint64_t index) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed),
                          static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(kind),
                          static_cast<std::uint32_t>(index),
                          static_cast<std::uint32_t>(index >> 32)};
        engine_.seed(seq);
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double next_unit() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Unbiased uniform integer in [0, bound); bound must be nonzero.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t limit = bound * (UINT64_MAX / bound);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    /// Standard normal variate (Box-Muller, second value cached).
    double next_gaussian() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double u1 = 1.0 - next_unit();  // (0, 1], keeps log() finite
        const double u2 = next_unit();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        cached_ = radius * std::sin(angle);
        has_cached_ = true;
        return radius * std::cos(angle);
    }

    /// Fills `bits` with independent fair bits, 64 per engine draw.
    void fill_bits(std::vector<std::uint8_t>& bits) {
        std::uint64_t word = 0;
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (i % 64 == 0) word = engine_();
            bits[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1u);
        }
    }

    /// Fisher-Yates shuffle with this stream's draws.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[next_below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}
