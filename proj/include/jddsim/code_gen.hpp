#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "jddsim/parity_check.hpp"
#include "jddsim/rng.hpp"

namespace jddsim {

namespace detail {

struct EdgeGraph {
    int n = 0, m = 0;
    std::vector<int> edge_row;
    std::vector<int> edge_col;
    std::vector<std::vector<int>> row_edges;  // edge ids per row
    std::vector<std::vector<int>> col_edges;  // edge ids per column

    bool has_edge(int r, int c) const {
        for (int e : row_edges[static_cast<std::size_t>(r)])
            if (edge_col[static_cast<std::size_t>(e)] == c) return true;
        return false;
    }

    int count_edge(int r, int c) const {
        int cnt = 0;
        for (int e : row_edges[static_cast<std::size_t>(r)])
            if (edge_col[static_cast<std::size_t>(e)] == c) ++cnt;
        return cnt;
    }

    // Swaps the column endpoints of edges a and b when neither swap would
    // create a duplicate edge. Returns false if the swap is illegal.
    bool swap_cols(int a, int b) {
        const int ra = edge_row[static_cast<std::size_t>(a)], ca = edge_col[static_cast<std::size_t>(a)];
        const int rb = edge_row[static_cast<std::size_t>(b)], cb = edge_col[static_cast<std::size_t>(b)];
        if (ca == cb || ra == rb) return false;
        if (has_edge(ra, cb) || has_edge(rb, ca)) return false;
        reattach_col(a, cb);
        reattach_col(b, ca);
        return true;
    }

    void reattach_col(int e, int new_col) {
        auto& old_list = col_edges[static_cast<std::size_t>(edge_col[static_cast<std::size_t>(e)])];
        old_list.erase(std::find(old_list.begin(), old_list.end(), e));
        edge_col[static_cast<std::size_t>(e)] = new_col;
        col_edges[static_cast<std::size_t>(new_col)].push_back(e);
    }
};

}  // namespace detail

/// Builds a pseudo-random (col_weight, row_weight)-regular parity-check
/// matrix with n columns via random socket matching. Duplicate edges are
/// repaired exactly; length-4 cycles are removed by bounded edge swaps
/// (best effort). Deterministic in `seed`.
inline ParityCheckMatrix generate_regular_code(int n, int col_weight, int row_weight, std::uint64_t seed) {
    if (n <= 0 || col_weight <= 0 || row_weight <= 0)
        throw std::invalid_argument("code generator: dimensions and weights must be positive");
    const long long sockets = static_cast<long long>(n) * col_weight;
    if (sockets % row_weight != 0)
        throw std::invalid_argument("code generator: n*col_weight = " + std::to_string(sockets) +
                                    " is not divisible by row_weight = " + std::to_string(row_weight));
    const int m = static_cast<int>(sockets / row_weight);
    if (m >= n)
        throw std::invalid_argument("code generator: would produce M = " + std::to_string(m) +
                                    " >= N = " + std::to_string(n) + " (rate <= 0)");
    if (row_weight > n)
        throw std::invalid_argument("code generator: row_weight exceeds n");

    RandomStream rng(seed, RandomStream::Kind::code_gen, 0);
    const int num_edges = static_cast<int>(sockets);

    detail::EdgeGraph g;
    g.n = n;
    g.m = m;
    g.edge_row.resize(static_cast<std::size_t>(num_edges));
    g.edge_col.resize(static_cast<std::size_t>(num_edges));
    g.row_edges.assign(static_cast<std::size_t>(m), {});
    g.col_edges.assign(static_cast<std::size_t>(n), {});

    std::vector<int> col_sockets(static_cast<std::size_t>(num_edges));
    for (int e = 0; e < num_edges; ++e) col_sockets[static_cast<std::size_t>(e)] = e / col_weight;
    rng.shuffle(col_sockets);
    for (int e = 0; e < num_edges; ++e) {
        g.edge_row[static_cast<std::size_t>(e)] = e / row_weight;
        g.edge_col[static_cast<std::size_t>(e)] = col_sockets[static_cast<std::size_t>(e)];
        g.row_edges[static_cast<std::size_t>(e / row_weight)].push_back(e);
        g.col_edges[static_cast<std::size_t>(col_sockets[static_cast<std::size_t>(e)])].push_back(e);
    }

    // Repair duplicate edges by swapping one copy with a random partner.
    long long budget = 200LL * num_edges;
    for (bool clean = false; !clean;) {
        clean = true;
        for (int e = 0; e < num_edges; ++e) {
            const int r = g.edge_row[static_cast<std::size_t>(e)];
            const int c = g.edge_col[static_cast<std::size_t>(e)];
            if (g.count_edge(r, c) < 2) continue;
            clean = false;
            bool repaired = false;
            while (budget-- > 0) {
                const int other = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(num_edges)));
                const int ro = g.edge_row[static_cast<std::size_t>(other)];
                const int co = g.edge_col[static_cast<std::size_t>(other)];
                if (ro == r || co == c) continue;
                if (g.has_edge(r, co) || g.has_edge(ro, c)) continue;
                g.reattach_col(e, co);
                g.reattach_col(other, c);
                repaired = true;
                break;
            }
            if (!repaired)
                throw std::runtime_error(
                    "code generator: could not eliminate duplicate edges (degenerate parameters)");
        }
    }

    // Best-effort girth-6 cleanup: break column pairs that share two rows.
    for (int pass = 0; pass < 12; ++pass) {
        std::unordered_map<long long, int> pair_first_edge;  // (col1, col2) -> edge of first sighting
        pair_first_edge.reserve(static_cast<std::size_t>(m) * row_weight * (row_weight - 1) / 2);
        long long violations = 0;
        for (int i = 0; i < m; ++i) {
            const auto& edges = g.row_edges[static_cast<std::size_t>(i)];
            for (std::size_t a = 0; a < edges.size(); ++a) {
                for (std::size_t b = a + 1; b < edges.size(); ++b) {
                    int c1 = g.edge_col[static_cast<std::size_t>(edges[a])];
                    int c2 = g.edge_col[static_cast<std::size_t>(edges[b])];
                    if (c1 > c2) std::swap(c1, c2);
                    const long long key = static_cast<long long>(c1) * n + c2;
                    auto [it, fresh] = pair_first_edge.try_emplace(key, edges[b]);
                    if (fresh) continue;
                    ++violations;
                    // Try a few random partners for the later edge.
                    for (int attempt = 0; attempt < 16; ++attempt) {
                        const int other = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(num_edges)));
                        if (g.swap_cols(edges[b], other)) break;
                    }
                }
            }
        }
        if (violations == 0) break;
    }

    std::vector<std::vector<int>> rows(static_cast<std::size_t>(m));
    for (int e = 0; e < num_edges; ++e)
        rows[static_cast<std::size_t>(g.edge_row[static_cast<std::size_t>(e)])].push_back(
            g.edge_col[static_cast<std::size_t>(e)]);
    return ParityCheckMatrix(n, std::move(rows));
}

/// M = 0 matrix: no parity constraints, every length-n word is a codeword.
inline ParityCheckMatrix uncoded_matrix(int n) { return ParityCheckMatrix(n, {}); }

}
