#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "jddsim/messages.hpp"
#include "jddsim/parity_check.hpp"

namespace jddsim {

enum class Schedule { chain_sweep, flooding };

struct DecoderConfig {
    int max_iterations = 20;
    bool early_stop = true;
    Schedule schedule = Schedule::chain_sweep;
};

struct DecodeResult {
    std::vector<std::uint8_t> hard_bits;
    bool converged = false;
    int iterations_used = 0;
};

/// Sum-product check-node update in the probability domain. The outgoing
/// message on edge e is the parity-consistent marginal of all other inputs:
///   p_out(1) = (1 - prod_{e' != e} (1 - 2 p_{e'}(1))) / 2.
inline std::vector<BitMessage> check_node_update(const std::vector<BitMessage>& incoming) {
    const std::size_t deg = incoming.size();
    if (deg < 2) throw std::invalid_argument("check_node_update: degree must be at least 2");
    std::vector<double> g(deg);  // 1 - 2 p(1), clamped
    for (std::size_t i = 0; i < deg; ++i) g[i] = 1.0 - 2.0 * clamp_prob(incoming[i].p1);

    std::vector<double> suffix(deg + 1, 1.0);
    for (std::size_t i = deg; i-- > 0;) suffix[i] = suffix[i + 1] * g[i];

    std::vector<BitMessage> out(deg);
    double prefix = 1.0;
    for (std::size_t i = 0; i < deg; ++i) {
        const double prod = prefix * suffix[i + 1];
        out[i] = BitMessage{(1.0 + prod) / 2.0, (1.0 - prod) / 2.0};
        normalize(out[i]);
        prefix *= g[i];
    }
    return out;
}

/// Sum-product variable-node update: the outgoing message to check e is the
/// normalized product of the prior and every incoming message except e; the
/// second return value is the full a-posteriori product. A vanished product
/// falls back to the uniform message; the caller receives the event count.
inline std::pair<std::vector<BitMessage>, BitMessage> variable_node_update(const BitMessage& prior,
                                                                           const std::vector<BitMessage>& incoming,
                                                                           long long* fallback_count = nullptr) {
    const std::size_t deg = incoming.size();
    long long fallbacks = 0;
    auto clamped = [](const BitMessage& m) { return BitMessage{clamp_prob(m.p0), clamp_prob(m.p1)}; };

    // prefix[i] = prior * incoming[0..i), normalized at every step.
    std::vector<BitMessage> prefix(deg + 1);
    prefix[0] = clamped(prior);
    for (std::size_t i = 0; i < deg; ++i) {
        const BitMessage t = clamped(incoming[i]);
        prefix[i + 1] = BitMessage{prefix[i].p0 * t.p0, prefix[i].p1 * t.p1};
        if (!normalize(prefix[i + 1])) ++fallbacks;
    }
    std::vector<BitMessage> suffix(deg + 1);
    suffix[deg] = BitMessage{1.0, 1.0};
    for (std::size_t i = deg; i-- > 0;) {
        const BitMessage t = clamped(incoming[i]);
        suffix[i] = BitMessage{suffix[i + 1].p0 * t.p0, suffix[i + 1].p1 * t.p1};
        if (!normalize(suffix[i])) ++fallbacks;
    }

    std::vector<BitMessage> out(deg);
    for (std::size_t i = 0; i < deg; ++i) {
        out[i] = BitMessage{prefix[i].p0 * suffix[i + 1].p0, prefix[i].p1 * suffix[i + 1].p1};
        if (!normalize(out[i])) ++fallbacks;
    }
    BitMessage app = prefix[deg];
    if (fallback_count) *fallback_count += fallbacks;
    return {std::move(out), app};
}

/// Edge-array sum-product engine for one parity-check matrix. Messages are
/// stored as p(1) per directed edge in row-major edge order. One instance
/// serves one decoder; the adjacency is copied so the engine owns its state.
class LdpcCore {
public:
    explicit LdpcCore(const ParityCheckMatrix& H)
        : n_(H.cols()), m_(H.rows()), rows_(H.row_adjacency()) {
        row_ptr_.assign(static_cast<std::size_t>(m_) + 1, 0);
        for (int i = 0; i < m_; ++i)
            row_ptr_[static_cast<std::size_t>(i) + 1] =
                row_ptr_[static_cast<std::size_t>(i)] + static_cast<int>(rows_[static_cast<std::size_t>(i)].size());
        const int edges = row_ptr_[static_cast<std::size_t>(m_)];
        col_edges_.assign(static_cast<std::size_t>(n_), {});
        for (int i = 0; i < m_; ++i) {
            int e = row_ptr_[static_cast<std::size_t>(i)];
            for (int j : rows_[static_cast<std::size_t>(i)]) {
                col_edges_[static_cast<std::size_t>(j)].push_back(e);
                ++e;
            }
        }
        var_to_check_.assign(static_cast<std::size_t>(edges), 0.5);
        check_to_var_.assign(static_cast<std::size_t>(edges), 0.5);
        int max_deg = 2;
        for (const auto& c : col_edges_) max_deg = std::max(max_deg, static_cast<int>(c.size()));
        for (const auto& r : rows_) max_deg = std::max(max_deg, static_cast<int>(r.size()));
        scratch_.resize(2 * static_cast<std::size_t>(max_deg) + 2);
        pair_scratch_.resize(2 * static_cast<std::size_t>(max_deg) + 2);
    }

    int cols() const { return n_; }
    int rows() const { return m_; }
    long long uniform_fallbacks() const { return fallbacks_; }

    void reset() {
        std::fill(var_to_check_.begin(), var_to_check_.end(), 0.5);
        std::fill(check_to_var_.begin(), check_to_var_.end(), 0.5);
        fallbacks_ = 0;
    }

    /// Variable-node half-iteration: var_to_check from priors and check_to_var.
    void variable_update(std::span<const BitMessage> priors) {
        for (int j = 0; j < n_; ++j) {
            const auto& edges = col_edges_[static_cast<std::size_t>(j)];
            const std::size_t deg = edges.size();
            if (deg == 0) continue;
            BitMessage* pre = pair_scratch_.data();
            pre[0] = BitMessage{clamp_prob(priors[static_cast<std::size_t>(j)].p0),
                                clamp_prob(priors[static_cast<std::size_t>(j)].p1)};
            for (std::size_t t = 0; t < deg; ++t) {
                const double p1 = clamp_prob(check_to_var_[static_cast<std::size_t>(edges[t])]);
                pre[t + 1] = BitMessage{pre[t].p0 * (1.0 - p1), pre[t].p1 * p1};
                if (!normalize(pre[t + 1])) ++fallbacks_;
            }
            BitMessage suf{1.0, 1.0};
            for (std::size_t t = deg; t-- > 0;) {
                BitMessage out{pre[t].p0 * suf.p0, pre[t].p1 * suf.p1};
                if (!normalize(out)) ++fallbacks_;
                var_to_check_[static_cast<std::size_t>(edges[t])] = out.p1;
                const double p1 = clamp_prob(check_to_var_[static_cast<std::size_t>(edges[t])]);
                suf = BitMessage{suf.p0 * (1.0 - p1), suf.p1 * p1};
                if (!normalize(suf)) ++fallbacks_;
            }
        }
    }

    /// Check-node half-iteration: check_to_var from var_to_check.
    void check_update() {
        for (int i = 0; i < m_; ++i) {
            const int begin = row_ptr_[static_cast<std::size_t>(i)];
            const int end = row_ptr_[static_cast<std::size_t>(i) + 1];
            const int deg = end - begin;
            double* suf = scratch_.data();
            suf[deg] = 1.0;
            for (int t = deg; t-- > 0;)
                suf[t] = suf[t + 1] * (1.0 - 2.0 * clamp_prob(var_to_check_[static_cast<std::size_t>(begin + t)]));
            double prefix = 1.0;
            for (int t = 0; t < deg; ++t) {
                const double g = 1.0 - 2.0 * clamp_prob(var_to_check_[static_cast<std::size_t>(begin + t)]);
                check_to_var_[static_cast<std::size_t>(begin + t)] = (1.0 - prefix * suf[t + 1]) / 2.0;
                prefix *= g;
            }
        }
    }

    /// Per-bit posterior: prior times all incoming check messages.
    void bit_app(std::span<const BitMessage> priors, std::span<BitMessage> app) {
        for (int j = 0; j < n_; ++j) {
            BitMessage acc{clamp_prob(priors[static_cast<std::size_t>(j)].p0),
                           clamp_prob(priors[static_cast<std::size_t>(j)].p1)};
            for (int e : col_edges_[static_cast<std::size_t>(j)]) {
                const double p1 = clamp_prob(check_to_var_[static_cast<std::size_t>(e)]);
                acc = BitMessage{acc.p0 * (1.0 - p1), acc.p1 * p1};
                if (!normalize(acc)) ++fallbacks_;
            }
            app[static_cast<std::size_t>(j)] = acc;
        }
    }

    /// Product of the incoming check messages only (the code-side belief a
    /// variable sends toward its demapper neighbor).
    void code_side_product(std::span<BitMessage> out) {
        for (int j = 0; j < n_; ++j) {
            BitMessage acc{1.0, 1.0};
            for (int e : col_edges_[static_cast<std::size_t>(j)]) {
                const double p1 = clamp_prob(check_to_var_[static_cast<std::size_t>(e)]);
                acc = BitMessage{acc.p0 * (1.0 - p1), acc.p1 * p1};
            }
            if (!normalize(acc)) ++fallbacks_;
            out[static_cast<std::size_t>(j)] = acc;
        }
    }

    bool syndrome_ok(std::span<const std::uint8_t> bits) const {
        for (const auto& row : rows_) {
            unsigned parity = 0;
            for (int j : row) parity ^= bits[static_cast<std::size_t>(j)];
            if (parity & 1u) return false;
        }
        return true;
    }

private:
    int n_ = 0;
    int m_ = 0;
    std::vector<std::vector<int>> rows_;
    std::vector<int> row_ptr_;
    std::vector<std::vector<int>> col_edges_;
    std::vector<double> var_to_check_;
    std::vector<double> check_to_var_;
    std::vector<double> scratch_;
    std::vector<BitMessage> pair_scratch_;
    long long fallbacks_ = 0;
};

/// Iterative decoding with fixed demapper priors (the serial receive chain):
/// repeated variable/check half-iterations with early stop on a clean
/// syndrome. Shared by the one-shot DQPSK and coherent QPSK baselines.
inline DecodeResult decode_with_priors(LdpcCore& core, std::span<const BitMessage> priors,
                                       const DecoderConfig& cfg) {
    if (priors.size() != static_cast<std::size_t>(core.cols()))
        throw std::invalid_argument("decode_with_priors: prior length mismatch");
    if (cfg.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
    core.reset();
    DecodeResult result;
    result.hard_bits.assign(static_cast<std::size_t>(core.cols()), 0);
    std::vector<BitMessage> app(static_cast<std::size_t>(core.cols()));
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        core.variable_update(priors);
        core.check_update();
        core.bit_app(priors, app);
        for (int j = 0; j < core.cols(); ++j)
            result.hard_bits[static_cast<std::size_t>(j)] = app[static_cast<std::size_t>(j)].p1 > 0.5 ? 1 : 0;
        result.iterations_used = it;
        result.converged = core.syndrome_ok(result.hard_bits);
        if (result.converged && cfg.early_stop) break;
    }
    if (!cfg.early_stop)
        result.converged = core.syndrome_ok(result.hard_bits);
    return result;
}

}
