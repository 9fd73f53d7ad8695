#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "jddsim/parity_check.hpp"

namespace jddsim {

/// Systematic LDPC encoder derived from H by one-time Gauss-Jordan
/// elimination over GF(2). Pivot columns carry parity bits, the remaining
/// K = N - rank(H) columns carry information bits in ascending column order.
/// Rank-deficient matrices are accepted; the effective K is reported.
class SystematicEncoder {
public:
    explicit SystematicEncoder(const ParityCheckMatrix& H) : n_(H.cols()) {
        const int m = H.rows();
        const int words = (n_ + 63) / 64;
        std::vector<std::vector<std::uint64_t>> mat(static_cast<std::size_t>(m),
                                                    std::vector<std::uint64_t>(static_cast<std::size_t>(words), 0));
        for (int i = 0; i < m; ++i)
            for (int j : H.row(i)) mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(j) / 64] |= 1ull << (j % 64);

        auto test = [&](int r, int c) {
            return (mat[static_cast<std::size_t>(r)][static_cast<std::size_t>(c) / 64] >> (c % 64)) & 1ull;
        };

        // Pivot from the last column backwards so information bits land on
        // the leading columns whenever the trailing square block is regular.
        std::vector<std::uint8_t> is_pivot_col(static_cast<std::size_t>(n_), 0);
        int next_row = 0;
        for (int c = n_ - 1; c >= 0 && next_row < m; --c) {
            int pivot = -1;
            for (int r = next_row; r < m; ++r) {
                if (test(r, c)) {
                    pivot = r;
                    break;
                }
            }
            if (pivot < 0) continue;
            std::swap(mat[static_cast<std::size_t>(pivot)], mat[static_cast<std::size_t>(next_row)]);
            for (int r = 0; r < m; ++r) {
                if (r != next_row && test(r, c)) {
                    for (int w = 0; w < words; ++w)
                        mat[static_cast<std::size_t>(r)][static_cast<std::size_t>(w)] ^=
                            mat[static_cast<std::size_t>(next_row)][static_cast<std::size_t>(w)];
                }
            }
            is_pivot_col[static_cast<std::size_t>(c)] = 1;
            pivot_cols_.push_back(c);
            ++next_row;
        }
        rank_ = next_row;

        for (int j = 0; j < n_; ++j)
            if (!is_pivot_col[static_cast<std::size_t>(j)]) info_positions_.push_back(j);
        k_ = static_cast<int>(info_positions_.size());

        // Row r of the reduced matrix reads c[pivot_cols_[r]] = sum of the
        // information bits it touches; store that row as a K-bit mask.
        info_words_ = (k_ + 63) / 64;
        parity_masks_.assign(static_cast<std::size_t>(rank_) * info_words_, 0);
        for (int r = 0; r < rank_; ++r) {
            for (int t = 0; t < k_; ++t) {
                const int j = info_positions_[static_cast<std::size_t>(t)];
                if (test(r, j))
                    parity_masks_[static_cast<std::size_t>(r) * info_words_ + static_cast<std::size_t>(t) / 64] |=
                        1ull << (t % 64);
            }
        }
    }

    int n() const { return n_; }
    int k() const { return k_; }
    int rank() const { return rank_; }
    const std::vector<int>& info_positions() const { return info_positions_; }

    void encode(std::span<const std::uint8_t> info, std::span<std::uint8_t> codeword) const {
        if (info.size() != static_cast<std::size_t>(k_) || codeword.size() != static_cast<std::size_t>(n_))
            throw std::invalid_argument("encode: length mismatch");
        std::vector<std::uint64_t> packed(static_cast<std::size_t>(info_words_), 0);
        for (int t = 0; t < k_; ++t)
            if (info[static_cast<std::size_t>(t)] & 1u) packed[static_cast<std::size_t>(t) / 64] |= 1ull << (t % 64);

        for (int t = 0; t < k_; ++t)
            codeword[static_cast<std::size_t>(info_positions_[static_cast<std::size_t>(t)])] =
                info[static_cast<std::size_t>(t)] & 1u;
        for (int r = 0; r < rank_; ++r) {
            int parity = 0;
            const std::uint64_t* mask = &parity_masks_[static_cast<std::size_t>(r) * info_words_];
            for (int w = 0; w < info_words_; ++w)
                parity ^= std::popcount(mask[w] & packed[static_cast<std::size_t>(w)]) & 1;
            codeword[static_cast<std::size_t>(pivot_cols_[static_cast<std::size_t>(r)])] =
                static_cast<std::uint8_t>(parity);
        }
    }

    std::vector<std::uint8_t> encode(const std::vector<std::uint8_t>& info) const {
        std::vector<std::uint8_t> codeword(static_cast<std::size_t>(n_));
        encode(info, codeword);
        return codeword;
    }

    void extract_info(std::span<const std::uint8_t> codeword, std::span<std::uint8_t> info) const {
        if (info.size() != static_cast<std::size_t>(k_) || codeword.size() != static_cast<std::size_t>(n_))
            throw std::invalid_argument("extract_info: length mismatch");
        for (int t = 0; t < k_; ++t)
            info[static_cast<std::size_t>(t)] =
                codeword[static_cast<std::size_t>(info_positions_[static_cast<std::size_t>(t)])];
    }

private:
    int n_ = 0;
    int k_ = 0;
    int rank_ = 0;
    int info_words_ = 0;
    std::vector<int> pivot_cols_;
    std::vector<int> info_positions_;
    std::vector<std::uint64_t> parity_masks_;
};

}
