#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace jddsim {

/// Sparse binary parity-check matrix H (M rows x N columns) stored as row and
/// column adjacency lists. Both adjacencies are kept sorted and are exact
/// transposes of each other. Immutable after construction, so instances can
/// be shared freely across worker threads.
class ParityCheckMatrix {
public:
    ParityCheckMatrix(int n_cols, std::vector<std::vector<int>> row_adjacency)
        : n_(n_cols), rows_(std::move(row_adjacency)) {
        if (n_ <= 0) throw std::invalid_argument("parity-check matrix needs at least one column");
        m_ = static_cast<int>(rows_.size());
        cols_.assign(static_cast<std::size_t>(n_), {});
        for (int i = 0; i < m_; ++i) {
            auto& row = rows_[static_cast<std::size_t>(i)];
            std::sort(row.begin(), row.end());
            for (std::size_t t = 0; t < row.size(); ++t) {
                const int j = row[t];
                if (j < 0 || j >= n_)
                    throw std::invalid_argument("row " + std::to_string(i) +
                                                ": column index " + std::to_string(j) + " out of range");
                if (t > 0 && row[t - 1] == j)
                    throw std::invalid_argument("row " + std::to_string(i) +
                                                ": duplicate column index " + std::to_string(j));
                cols_[static_cast<std::size_t>(j)].push_back(i);
            }
        }
        max_row_degree_ = 0;
        for (const auto& row : rows_) max_row_degree_ = std::max(max_row_degree_, static_cast<int>(row.size()));
        max_col_degree_ = 0;
        for (const auto& col : cols_) max_col_degree_ = std::max(max_col_degree_, static_cast<int>(col.size()));
    }

    int cols() const { return n_; }
    int rows() const { return m_; }
    int max_row_degree() const { return max_row_degree_; }
    int max_col_degree() const { return max_col_degree_; }

    std::span<const int> row(int i) const { return rows_[static_cast<std::size_t>(i)]; }
    std::span<const int> col(int j) const { return cols_[static_cast<std::size_t>(j)]; }

    const std::vector<std::vector<int>>& row_adjacency() const { return rows_; }
    const std::vector<std::vector<int>>& col_adjacency() const { return cols_; }

    /// Number of parity equations violated by `bits` (length N, values 0/1).
    int syndrome_fail_count(std::span<const std::uint8_t> bits) const {
        check_length(bits.size());
        int failing = 0;
        for (const auto& row : rows_) {
            unsigned parity = 0;
            for (int j : row) parity ^= bits[static_cast<std::size_t>(j)];
            failing += static_cast<int>(parity & 1u);
        }
        return failing;
    }

    /// True iff every parity equation holds (early exit on first violation).
    bool syndrome_ok(std::span<const std::uint8_t> bits) const {
        check_length(bits.size());
        for (const auto& row : rows_) {
            unsigned parity = 0;
            for (int j : row) parity ^= bits[static_cast<std::size_t>(j)];
            if (parity & 1u) return false;
        }
        return true;
    }

    bool operator==(const ParityCheckMatrix& other) const {
        return n_ == other.n_ && rows_ == other.rows_;
    }

    /// FNV-1a hash of the dimensions and row adjacency; identifies a code in
    /// run manifests.
    std::uint64_t fingerprint() const {
        std::uint64_t h = 0xcbf29ce484222325ull;
        auto mix = [&h](std::uint64_t v) {
            for (int b = 0; b < 8; ++b) {
                h ^= (v >> (8 * b)) & 0xffu;
                h *= 0x100000001b3ull;
            }
        };
        mix(static_cast<std::uint64_t>(n_));
        mix(static_cast<std::uint64_t>(m_));
        for (const auto& row : rows_) {
            mix(static_cast<std::uint64_t>(row.size()));
            for (int j : row) mix(static_cast<std::uint64_t>(j));
        }
        return h;
    }

private:
    void check_length(std::size_t len) const {
        if (len != static_cast<std::size_t>(n_))
            throw std::invalid_argument("bit vector length does not match codeword length");
    }

    int n_ = 0;
    int m_ = 0;
    int max_row_degree_ = 0;
    int max_col_degree_ = 0;
    std::vector<std::vector<int>> rows_;
    std::vector<std::vector<int>> cols_;
};

}
