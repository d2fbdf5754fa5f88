#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace etm {

// Simple graph on n labeled vertices stored as bit-set adjacency rows, with
// edge and triangle counts maintained incrementally. Single writer; cheap to
// copy. common_neighbors is word-parallel AND + popcount.
class GraphState {
public:
    explicit GraphState(int n) : n_(n), words_((n + 63) / 64), rows_(std::size_t(n) * words_, 0) {
        if (n < 2) throw std::invalid_argument("GraphState: need n >= 2");
    }

    static GraphState complete(int n) {
        GraphState g(n);
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v) g.set_edge(u, v, true);
        return g;
    }

    int vertex_count() const { return n_; }
    std::int64_t max_edges() const { return std::int64_t(n_) * (n_ - 1) / 2; }
    std::int64_t edge_count() const { return edges_; }
    std::int64_t triangle_count() const { return triangles_; }

    bool has_edge(int u, int v) const {
        check_pair(u, v);
        return (row(u)[v >> 6] >> (v & 63)) & 1U;
    }

    // |N(u) ∩ N(v)|; the zero diagonal makes u and v themselves never count.
    int common_neighbors(int u, int v) const {
        check_pair(u, v);
        const std::uint64_t* a = row(u);
        const std::uint64_t* b = row(v);
        int c = 0;
        for (int w = 0; w < words_; ++w) c += std::popcount(a[w] & b[w]);
        return c;
    }

    // Sets x_uv; returns whether the state changed. On a change the edge count
    // moves by +-1 and the triangle count by +-common_neighbors(u,v).
    bool set_edge(int u, int v, bool present) {
        check_pair(u, v);
        const bool cur = (row(u)[v >> 6] >> (v & 63)) & 1U;
        if (cur == present) return false;
        const int c = common_neighbors(u, v);
        toggle(u, v);
        toggle(v, u);
        if (present) {
            ++edges_;
            triangles_ += c;
        } else {
            --edges_;
            triangles_ -= c;
        }
        return true;
    }

    // From-scratch recount oracle for the cached values: E by popcount,
    // T = (1/3) sum over present edges of common_neighbors.
    std::pair<std::int64_t, std::int64_t> full_recount() const {
        std::int64_t bits = 0;
        for (std::uint64_t w : rows_) bits += std::popcount(w);
        std::int64_t tri3 = 0;
        for (int u = 0; u < n_; ++u)
            for (int v = u + 1; v < n_; ++v)
                if (has_edge(u, v)) tri3 += common_neighbors(u, v);
        return {bits / 2, tri3 / 3};
    }

private:
    void check_pair(int u, int v) const {
        if (u < 0 || v < 0 || u >= n_ || v >= n_) {
            throw std::out_of_range("GraphState: vertex out of range");
        }
        if (u == v) throw std::invalid_argument("GraphState: self-loop");
    }
    const std::uint64_t* row(int u) const { return rows_.data() + std::size_t(u) * words_; }
    std::uint64_t* row(int u) { return rows_.data() + std::size_t(u) * words_; }
    void toggle(int u, int v) { row(u)[v >> 6] ^= std::uint64_t(1) << (v & 63); }

    int n_;
    int words_;
    std::vector<std::uint64_t> rows_;
    std::int64_t edges_ = 0;
    std::int64_t triangles_ = 0;
};

}  // namespace etm
