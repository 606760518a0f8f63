#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "monoembed/bits.hpp"
#include "monoembed/rng.hpp"

namespace monoembed {

struct Vertex {
    int part = 0;
    int index = 0;
    friend bool operator==(const Vertex&, const Vertex&) = default;
    friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

struct VertexSet {
    int part = 0;
    std::vector<int> members;
    std::size_t size() const { return members.size(); }
};

// r-partite host graph with N vertices per part and cross-part edges only.
// For every ordered part pair (i,j) the full N x N adjacency is kept as N
// bit rows, so neighborhood restrictions to one part are word operations.
class MultipartiteGraph {
public:
    MultipartiteGraph() = default;
    MultipartiteGraph(int r, int N) : r_(r), N_(N), words_((N + 63) / 64) {
        if (r < 2) throw std::invalid_argument("multipartite graph needs r >= 2");
        if (N < 1) throw std::invalid_argument("multipartite graph needs N >= 1");
        rows_.assign(static_cast<std::size_t>(r) * r, {});
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j)
                if (i != j)
                    rows_[slot(i, j)].assign(static_cast<std::size_t>(N) * words_, 0);
    }

    int r() const { return r_; }
    int N() const { return N_; }
    std::size_t words_per_row() const { return words_; }
    std::uint64_t edge_count() const { return edges_; }

    void check_vertex(Vertex v) const {
        if (v.part < 0 || v.part >= r_ || v.index < 0 || v.index >= N_)
            throw std::out_of_range("vertex outside graph");
    }

    void add_edge(Vertex u, Vertex v) {
        check_vertex(u);
        check_vertex(v);
        if (u.part == v.part) throw std::invalid_argument("edges join distinct parts");
        if (!test_bit(u, v)) {
            set_bit(u, v);
            set_bit(v, u);
            ++edges_;
        }
    }

    void remove_edge(Vertex u, Vertex v) {
        check_vertex(u);
        check_vertex(v);
        if (u.part == v.part) throw std::invalid_argument("edges join distinct parts");
        if (test_bit(u, v)) {
            clear_bit(u, v);
            clear_bit(v, u);
            --edges_;
        }
    }

    bool has_edge(Vertex u, Vertex v) const {
        if (u.part == v.part) return false;
        return test_bit(u, v);
    }

    // Bit row of u's neighbourhood inside part j.
    const std::uint64_t* neighbor_row(Vertex u, int j) const {
        return rows_[slot(u.part, j)].data() + static_cast<std::size_t>(u.index) * words_;
    }

    std::size_t degree_into(Vertex u, int j, const Bitset& mask) const {
        return and_count_raw(neighbor_row(u, j), mask);
    }

    std::vector<int> neighbors_in_part(Vertex u, int j) const {
        std::vector<int> out;
        const std::uint64_t* row = neighbor_row(u, j);
        for (std::size_t k = 0; k < words_; ++k) {
            std::uint64_t w = row[k];
            while (w) {
                int b = std::countr_zero(w);
                out.push_back(static_cast<int>(k * 64 + b));
                w &= w - 1;
            }
        }
        return out;
    }

    // Canonical edge enumeration: part pairs (i,j), i<j, in lexicographic
    // order, then row-major over (a,b). Generation, coloring and file
    // output all follow this order.
    template <class F>
    void for_each_edge(F&& f) const {
        for (int i = 0; i < r_; ++i)
            for (int j = i + 1; j < r_; ++j)
                for (int a = 0; a < N_; ++a) {
                    const std::uint64_t* row =
                        rows_[slot(i, j)].data() + static_cast<std::size_t>(a) * words_;
                    for (std::size_t k = 0; k < words_; ++k) {
                        std::uint64_t w = row[k];
                        while (w) {
                            int b = std::countr_zero(w);
                            f(Vertex{i, a}, Vertex{j, static_cast<int>(k * 64 + b)});
                            w &= w - 1;
                        }
                    }
                }
    }

    std::uint64_t count_edges_between(const Bitset& xmask, int xpart,
                                      const Bitset& ymask, int ypart) const {
        std::uint64_t e = 0;
        for (std::size_t a = xmask.find_next(0); a < xmask.size(); a = xmask.find_next(a + 1))
            e += degree_into(Vertex{xpart, static_cast<int>(a)}, ypart, ymask);
        return e;
    }

private:
    std::size_t slot(int i, int j) const { return static_cast<std::size_t>(i) * r_ + j; }
    void set_bit(Vertex u, Vertex v) {
        rows_[slot(u.part, v.part)][static_cast<std::size_t>(u.index) * words_ + (v.index >> 6)] |=
            std::uint64_t{1} << (v.index & 63);
    }
    void clear_bit(Vertex u, Vertex v) {
        rows_[slot(u.part, v.part)][static_cast<std::size_t>(u.index) * words_ + (v.index >> 6)] &=
            ~(std::uint64_t{1} << (v.index & 63));
    }
    bool test_bit(Vertex u, Vertex v) const {
        return (rows_[slot(u.part, v.part)][static_cast<std::size_t>(u.index) * words_ +
                                            (v.index >> 6)] >>
                (v.index & 63)) &
               1;
    }

    int r_ = 0;
    int N_ = 0;
    std::size_t words_ = 0;
    std::uint64_t edges_ = 0;
    std::vector<std::vector<std::uint64_t>> rows_;
};

// Each of the C(r,2)*N^2 cross-part slots is an edge independently with
// probability p, drawn in canonical order from Rng(seed).
inline MultipartiteGraph generate_random(int r, int N, double p, std::uint64_t seed) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("edge probability outside [0,1]");
    MultipartiteGraph g(r, N);
    Rng rng(seed);
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j)
            for (int a = 0; a < N; ++a)
                for (int b = 0; b < N; ++b)
                    if (rng.coin(p)) g.add_edge({i, a}, {j, b});
    return g;
}

// p-normalized edge density between two sets in distinct parts.
inline double pair_density(const MultipartiteGraph& g, const VertexSet& x, const VertexSet& y,
                           double p) {
    if (x.part == y.part) throw std::domain_error("pair density needs distinct parts");
    if (x.members.empty() || y.members.empty())
        throw std::domain_error("pair density of an empty set");
    if (p <= 0.0) throw std::domain_error("pair density needs p > 0");
    Bitset ymask = make_mask(g.N(), y.members);
    std::uint64_t e = 0;
    for (int a : x.members) e += g.degree_into(Vertex{x.part, a}, y.part, ymask);
    return static_cast<double>(e) /
           (p * static_cast<double>(x.members.size()) * static_cast<double>(y.members.size()));
}

enum class Color : std::uint8_t { Red = 0, Blue = 1 };

inline char color_letter(Color c) { return c == Color::Red ? 'R' : 'B'; }

// Two-coloring of the host's edges, one bit per adjacency slot (set = Red)
// in the same canonical layout as the graph. Lookups are only meaningful
// on actual edges of the graph it was built for.
class EdgeColoring {
public:
    EdgeColoring() = default;
    EdgeColoring(int r, int N) : r_(r), N_(N), words_((N + 63) / 64) {
        red_.assign(static_cast<std::size_t>(r) * r, {});
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j)
                if (i != j) red_[slot(i, j)].assign(static_cast<std::size_t>(N) * words_, 0);
    }

    int r() const { return r_; }
    int N() const { return N_; }
    std::uint64_t colored_edges() const { return total_; }
    std::uint64_t red_edges() const { return reds_; }

    void set_color(Vertex u, Vertex v, Color c) {
        if (c == Color::Red) {
            set_bit(u, v);
            set_bit(v, u);
            ++reds_;
        }
        ++total_;
    }

    Color color_of(const MultipartiteGraph& g, Vertex u, Vertex v) const {
        if (!g.has_edge(u, v)) throw std::domain_error("coloring queried on a non-edge");
        return test_bit(u, v) ? Color::Red : Color::Blue;
    }

    bool is_red_slot(Vertex u, Vertex v) const { return test_bit(u, v); }

private:
    std::size_t slot(int i, int j) const { return static_cast<std::size_t>(i) * r_ + j; }
    void set_bit(Vertex u, Vertex v) {
        red_[slot(u.part, v.part)][static_cast<std::size_t>(u.index) * words_ + (v.index >> 6)] |=
            std::uint64_t{1} << (v.index & 63);
    }
    bool test_bit(Vertex u, Vertex v) const {
        return (red_[slot(u.part, v.part)][static_cast<std::size_t>(u.index) * words_ +
                                           (v.index >> 6)] >>
                (v.index & 63)) &
               1;
    }

    int r_ = 0;
    int N_ = 0;
    std::size_t words_ = 0;
    std::uint64_t total_ = 0;
    std::uint64_t reds_ = 0;
    std::vector<std::vector<std::uint64_t>> red_;
};

template <class Pred>
EdgeColoring make_coloring(const MultipartiteGraph& g, Pred&& color_of_edge) {
    EdgeColoring c(g.r(), g.N());
    g.for_each_edge([&](Vertex u, Vertex v) { c.set_color(u, v, color_of_edge(u, v)); });
    return c;
}

enum class ColoringStrategy { UniformRandom, AllRed, MajoritySplit, PartBlock };

inline ColoringStrategy parse_strategy(const std::string& s) {
    if (s == "uniform-random") return ColoringStrategy::UniformRandom;
    if (s == "all-red") return ColoringStrategy::AllRed;
    if (s == "majority-split") return ColoringStrategy::MajoritySplit;
    if (s == "part-block") return ColoringStrategy::PartBlock;
    throw std::invalid_argument("unknown coloring strategy: " + s);
}

// part-block rule: pair (i,j), i<j, is Red iff its rank in lexicographic
// pair order is below floor(C(r,2)/2).
inline bool part_block_red(int r, int i, int j) {
    int rank = 0, cnt = 0;
    for (int a = 0; a < r; ++a)
        for (int b = a + 1; b < r; ++b) {
            if (a == i && b == j) rank = cnt;
            ++cnt;
        }
    return rank < cnt / 2;
}

inline EdgeColoring color_edges(const MultipartiteGraph& g, ColoringStrategy strategy,
                                std::uint64_t seed) {
    switch (strategy) {
        case ColoringStrategy::UniformRandom: {
            Rng rng(seed);
            return make_coloring(g, [&](Vertex, Vertex) {
                return rng.coin(0.5) ? Color::Red : Color::Blue;
            });
        }
        case ColoringStrategy::AllRed:
            return make_coloring(g, [](Vertex, Vertex) { return Color::Red; });
        case ColoringStrategy::MajoritySplit:
            return make_coloring(g, [](Vertex u, Vertex v) {
                return (u.index + v.index) % 2 == 0 ? Color::Red : Color::Blue;
            });
        case ColoringStrategy::PartBlock:
            return make_coloring(g, [&](Vertex u, Vertex v) {
                int i = u.part < v.part ? u.part : v.part;
                int j = u.part < v.part ? v.part : u.part;
                return part_block_red(g.r(), i, j) ? Color::Red : Color::Blue;
            });
    }
    throw std::logic_error("unreachable");
}

inline MultipartiteGraph monochrome_view(const MultipartiteGraph& g, const EdgeColoring& c,
                                         Color color) {
    MultipartiteGraph out(g.r(), g.N());
    g.for_each_edge([&](Vertex u, Vertex v) {
        bool red = c.is_red_slot(u, v);
        if ((color == Color::Red) == red) out.add_edge(u, v);
    });
    return out;
}

}  // namespace monoembed
