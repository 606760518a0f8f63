#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "monoembed/graph.hpp"
#include "monoembed/target.hpp"

namespace monoembed {

// Text formats. Lines starting with '#' are comments. Host graphs:
//   mpg <r> <N>
//   <i> <a> <j> <b>        one edge per line, i < j, 0-indexed
// Colorings:
//   col <edge-count>
//   <i> <a> <j> <b> <R|B>
// Embedding targets:
//   tg <n>
//   <u> <v>

namespace detail {
inline bool next_content_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        std::size_t k = line.find_first_not_of(" \t\r");
        if (k == std::string::npos) continue;
        if (line[k] == '#') continue;
        return true;
    }
    return false;
}
}  // namespace detail

inline void write_graph(std::ostream& out, const MultipartiteGraph& g) {
    out << "mpg " << g.r() << ' ' << g.N() << '\n';
    g.for_each_edge([&](Vertex u, Vertex v) {
        out << u.part << ' ' << u.index << ' ' << v.part << ' ' << v.index << '\n';
    });
}

inline MultipartiteGraph read_graph(std::istream& in) {
    std::string line;
    if (!detail::next_content_line(in, line)) throw std::runtime_error("empty graph file");
    std::istringstream head(line);
    std::string magic;
    int r = 0, N = 0;
    if (!(head >> magic >> r >> N) || magic != "mpg")
        throw std::runtime_error("graph file must start with 'mpg <r> <N>'");
    MultipartiteGraph g(r, N);
    while (detail::next_content_line(in, line)) {
        std::istringstream ls(line);
        int i, a, j, b;
        if (!(ls >> i >> a >> j >> b)) throw std::runtime_error("malformed edge line: " + line);
        if (i >= j) throw std::runtime_error("edge lines need part i < part j: " + line);
        g.add_edge({i, a}, {j, b});
    }
    return g;
}

inline void write_coloring(std::ostream& out, const MultipartiteGraph& g, const EdgeColoring& c) {
    out << "col " << g.edge_count() << '\n';
    g.for_each_edge([&](Vertex u, Vertex v) {
        out << u.part << ' ' << u.index << ' ' << v.part << ' ' << v.index << ' '
            << color_letter(c.color_of(g, u, v)) << '\n';
    });
}

// Validates totality: every line must be an edge of g, no duplicates, and
// the count must cover the whole edge set.
inline EdgeColoring read_coloring(std::istream& in, const MultipartiteGraph& g) {
    std::string line;
    if (!detail::next_content_line(in, line)) throw std::runtime_error("empty coloring file");
    std::istringstream head(line);
    std::string magic;
    std::uint64_t count = 0;
    if (!(head >> magic >> count) || magic != "col")
        throw std::runtime_error("coloring file must start with 'col <edge-count>'");
    if (count != g.edge_count())
        throw std::runtime_error("coloring edge count does not match graph");
    EdgeColoring c(g.r(), g.N());
    MultipartiteGraph seen(g.r(), g.N());
    std::uint64_t lines = 0;
    while (detail::next_content_line(in, line)) {
        std::istringstream ls(line);
        int i, a, j, b;
        char col;
        if (!(ls >> i >> a >> j >> b >> col) || (col != 'R' && col != 'B'))
            throw std::runtime_error("malformed coloring line: " + line);
        Vertex u{i, a}, v{j, b};
        if (!g.has_edge(u, v)) throw std::runtime_error("coloring line is not a graph edge: " + line);
        if (seen.has_edge(u, v)) throw std::runtime_error("duplicate coloring line: " + line);
        seen.add_edge(u, v);
        c.set_color(u, v, col == 'R' ? Color::Red : Color::Blue);
        ++lines;
    }
    if (lines != count) throw std::runtime_error("coloring does not cover every edge");
    return c;
}

inline void write_target(std::ostream& out, const TargetGraph& h) {
    out << "tg " << h.n << '\n';
    for (auto [u, v] : h.edges()) out << u << ' ' << v << '\n';
}

inline TargetGraph read_target(std::istream& in) {
    std::string line;
    if (!detail::next_content_line(in, line)) throw std::runtime_error("empty target file");
    std::istringstream head(line);
    std::string magic;
    int n = 0;
    if (!(head >> magic >> n) || magic != "tg")
        throw std::runtime_error("target file must start with 'tg <n>'");
    TargetGraph h(n);
    while (detail::next_content_line(in, line)) {
        std::istringstream ls(line);
        int u, v;
        if (!(ls >> u >> v)) throw std::runtime_error("malformed target edge line: " + line);
        h.add_edge(u, v);
    }
    return h;
}

}  // namespace monoembed
