#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "jddsim/parity_check.hpp"

namespace jddsim {

/// Thrown on malformed alist input; carries the 1-based line number.
class AlistParseError : public std::runtime_error {
public:
    AlistParseError(int line, const std::string& what)
        : std::runtime_error("alist line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

namespace detail {

class AlistReader {
public:
    explicit AlistReader(std::istream& in) : in_(in) {}

    /// Next non-empty line split into integers. Returns false on EOF.
    bool next_line(std::vector<long>& out) {
        std::string text;
        while (std::getline(in_, text)) {
            ++line_;
            out.clear();
            std::istringstream ss(text);
            std::string tok;
            while (ss >> tok) {
                try {
                    std::size_t pos = 0;
                    const long v = std::stol(tok, &pos);
                    if (pos != tok.size()) throw std::invalid_argument(tok);
                    out.push_back(v);
                } catch (const std::exception&) {
                    throw AlistParseError(line_, "expected an integer, got '" + tok + "'");
                }
            }
            if (!out.empty()) return true;
        }
        return false;
    }

    int line() const { return line_; }

private:
    std::istream& in_;
    int line_ = 0;
};

}  // namespace detail

/// Parses the MacKay alist format:
///   line 1: N M
///   line 2: max_col_degree max_row_degree
///   line 3: N column degrees
///   line 4: M row degrees
///   N lines of 1-based row indices per column (zero padding ignored)
///   M lines of 1-based column indices per row (zero padding ignored)
/// The column and row sections must describe the same matrix.
inline ParityCheckMatrix load_alist(std::istream& in) {
    detail::AlistReader reader(in);
    std::vector<long> nums;

    auto require_line = [&](const char* what) {
        if (!reader.next_line(nums))
            throw AlistParseError(reader.line() + 1, std::string("unexpected end of input, expected ") + what);
    };

    require_line("'N M'");
    if (nums.size() != 2) throw AlistParseError(reader.line(), "expected exactly two values 'N M'");
    const long n = nums[0], m = nums[1];
    if (n <= 0 || m < 0) throw AlistParseError(reader.line(), "invalid dimensions");

    require_line("'max_col_degree max_row_degree'");
    if (nums.size() != 2) throw AlistParseError(reader.line(), "expected 'max_col_degree max_row_degree'");
    const long max_col_deg = nums[0], max_row_deg = nums[1];
    if (max_col_deg < 0 || max_col_deg > m || max_row_deg < 0 || max_row_deg > n)
        throw AlistParseError(reader.line(), "maximum degrees out of range");

    require_line("column degrees");
    if (static_cast<long>(nums.size()) != n)
        throw AlistParseError(reader.line(), "expected " + std::to_string(n) + " column degrees");
    std::vector<int> col_deg(nums.begin(), nums.end());
    long col_deg_total = 0;
    for (int d : col_deg) {
        if (d < 0 || d > max_col_deg)
            throw AlistParseError(reader.line(), "column degree " + std::to_string(d) +
                                                     " exceeds declared maximum " + std::to_string(max_col_deg));
        col_deg_total += d;
    }

    std::vector<int> row_deg;
    long row_deg_total = 0;
    if (m > 0) {
        require_line("row degrees");
        if (static_cast<long>(nums.size()) != m)
            throw AlistParseError(reader.line(), "expected " + std::to_string(m) + " row degrees");
        row_deg.assign(nums.begin(), nums.end());
        for (int d : row_deg) {
            if (d < 0 || d > max_row_deg)
                throw AlistParseError(reader.line(), "row degree " + std::to_string(d) +
                                                         " exceeds declared maximum " + std::to_string(max_row_deg));
            row_deg_total += d;
        }
        if (row_deg_total != col_deg_total)
            throw AlistParseError(reader.line(), "row degree total " + std::to_string(row_deg_total) +
                                                     " does not match column degree total " +
                                                     std::to_string(col_deg_total));
    }

    // Column section: rows attached to each column.
    std::vector<std::vector<int>> from_cols(static_cast<std::size_t>(m));
    for (long j = 0; j < n; ++j) {
        require_line("a column index line");
        std::vector<int> seen;
        for (long v : nums) {
            if (v == 0) continue;  // padding
            if (v < 1 || v > m)
                throw AlistParseError(reader.line(), "row index " + std::to_string(v) + " out of range");
            seen.push_back(static_cast<int>(v - 1));
        }
        std::sort(seen.begin(), seen.end());
        for (std::size_t t = 1; t < seen.size(); ++t)
            if (seen[t] == seen[t - 1])
                throw AlistParseError(reader.line(), "duplicate row index in column " + std::to_string(j + 1));
        if (static_cast<int>(seen.size()) != col_deg[static_cast<std::size_t>(j)])
            throw AlistParseError(reader.line(), "column " + std::to_string(j + 1) + " declares degree " +
                                                     std::to_string(col_deg[static_cast<std::size_t>(j)]) +
                                                     " but lists " + std::to_string(seen.size()) + " entries");
        for (int i : seen) from_cols[static_cast<std::size_t>(i)].push_back(static_cast<int>(j));
    }

    // Row section: columns attached to each row; must transpose-match above.
    std::vector<std::vector<int>> rows(static_cast<std::size_t>(m));
    for (long i = 0; i < m; ++i) {
        require_line("a row index line");
        std::vector<int> seen;
        for (long v : nums) {
            if (v == 0) continue;
            if (v < 1 || v > n)
                throw AlistParseError(reader.line(), "column index " + std::to_string(v) + " out of range");
            seen.push_back(static_cast<int>(v - 1));
        }
        std::sort(seen.begin(), seen.end());
        for (std::size_t t = 1; t < seen.size(); ++t)
            if (seen[t] == seen[t - 1])
                throw AlistParseError(reader.line(), "duplicate column index in row " + std::to_string(i + 1));
        if (static_cast<int>(seen.size()) != row_deg[static_cast<std::size_t>(i)])
            throw AlistParseError(reader.line(), "row " + std::to_string(i + 1) + " declares degree " +
                                                     std::to_string(row_deg[static_cast<std::size_t>(i)]) +
                                                     " but lists " + std::to_string(seen.size()) + " entries");
        if (seen != from_cols[static_cast<std::size_t>(i)])
            throw AlistParseError(reader.line(), "row " + std::to_string(i + 1) +
                                                     " disagrees with the column section");
        rows[static_cast<std::size_t>(i)] = std::move(seen);
    }

    if (reader.next_line(nums))
        throw AlistParseError(reader.line(), "trailing data after matrix definition");

    return ParityCheckMatrix(static_cast<int>(n), std::move(rows));
}

inline ParityCheckMatrix load_alist_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open alist file: " + path);
    return load_alist(in);
}

/// Writes `H` in the alist format accepted by load_alist (no zero padding).
inline void emit_alist(const ParityCheckMatrix& H, std::ostream& out) {
    out << H.cols() << ' ' << H.rows() << '\n';
    out << H.max_col_degree() << ' ' << H.max_row_degree() << '\n';
    for (int j = 0; j < H.cols(); ++j) out << H.col(j).size() << (j + 1 < H.cols() ? ' ' : '\n');
    for (int i = 0; i < H.rows(); ++i) out << H.row(i).size() << (i + 1 < H.rows() ? ' ' : '\n');
    // Degree-zero lines carry a single padding 0 so they survive readers
    // that skip blank lines.
    for (int j = 0; j < H.cols(); ++j) {
        const auto col = H.col(j);
        if (col.empty()) { out << "0\n"; continue; }
        for (std::size_t t = 0; t < col.size(); ++t) out << col[t] + 1 << (t + 1 < col.size() ? ' ' : '\n');
    }
    for (int i = 0; i < H.rows(); ++i) {
        const auto row = H.row(i);
        if (row.empty()) { out << "0\n"; continue; }
        for (std::size_t t = 0; t < row.size(); ++t) out << row[t] + 1 << (t + 1 < row.size() ? ' ' : '\n');
    }
}

inline std::string emit_alist(const ParityCheckMatrix& H) {
    std::ostringstream out;
    emit_alist(H, out);
    return out.str();
}

}
