#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "monoembed/rng.hpp"

namespace monoembed {

// Simple undirected graph on [0, n): the graph to be embedded, and the
// container used for the small graphs fed to the brute-force oracles.
struct TargetGraph {
    int n = 0;
    std::vector<std::vector<int>> adj;

    TargetGraph() = default;
    explicit TargetGraph(int n_) : n(n_), adj(n_) {
        if (n_ < 0) throw std::invalid_argument("negative vertex count");
    }

    void add_edge(int u, int v) {
        if (u < 0 || v < 0 || u >= n || v >= n) throw std::out_of_range("edge endpoint outside graph");
        if (u == v) throw std::invalid_argument("self loops not allowed");
        if (has_edge(u, v)) return;
        adj[u].push_back(v);
        adj[v].push_back(u);
        std::sort(adj[u].begin(), adj[u].end());
        std::sort(adj[v].begin(), adj[v].end());
    }

    bool has_edge(int u, int v) const {
        return std::binary_search(adj[u].begin(), adj[u].end(), v);
    }

    int degree(int v) const { return static_cast<int>(adj[v].size()); }

    int max_degree() const {
        int d = 0;
        for (int v = 0; v < n; ++v) d = std::max(d, degree(v));
        return d;
    }

    std::size_t edge_count() const {
        std::size_t s = 0;
        for (const auto& a : adj) s += a.size();
        return s / 2;
    }

    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> out;
        for (int u = 0; u < n; ++u)
            for (int v : adj[u])
                if (u < v) out.emplace_back(u, v);
        return out;
    }
};

inline TargetGraph path_graph(int n) {
    TargetGraph h(n);
    for (int i = 0; i + 1 < n; ++i) h.add_edge(i, i + 1);
    return h;
}

inline TargetGraph cycle_graph(int n) {
    if (n < 3) throw std::invalid_argument("cycle needs at least 3 vertices");
    TargetGraph h = path_graph(n);
    h.add_edge(n - 1, 0);
    return h;
}

// k disjoint edges on 2k vertices.
inline TargetGraph matching_graph(int k) {
    TargetGraph h(2 * k);
    for (int i = 0; i < k; ++i) h.add_edge(2 * i, 2 * i + 1);
    return h;
}

inline TargetGraph complete_graph(int n) {
    TargetGraph h(n);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) h.add_edge(u, v);
    return h;
}

inline TargetGraph disjoint_union(const std::vector<TargetGraph>& parts) {
    int n = 0;
    for (const auto& g : parts) n += g.n;
    TargetGraph h(n);
    int off = 0;
    for (const auto& g : parts) {
        for (auto [u, v] : g.edges()) h.add_edge(off + u, off + v);
        off += g.n;
    }
    return h;
}

// Random graph with maximum degree at most cap: candidate edges in random
// order, accepted while both endpoints have room.
inline TargetGraph random_bounded_degree(int n, int cap, double edge_fraction,
                                         std::uint64_t seed) {
    if (cap < 0) throw std::invalid_argument("negative degree cap");
    TargetGraph h(n);
    std::vector<std::pair<int, int>> slots;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) slots.emplace_back(u, v);
    Rng rng(seed);
    rng.shuffle(slots);
    std::size_t want = static_cast<std::size_t>(edge_fraction * static_cast<double>(slots.size()));
    for (auto [u, v] : slots) {
        if (h.edge_count() >= want) break;
        if (h.degree(u) < cap && h.degree(v) < cap) h.add_edge(u, v);
    }
    return h;
}

// d-regular graph via the pairing model, retrying until simple.
inline TargetGraph random_regular(int n, int d, std::uint64_t seed) {
    if (n * d % 2 != 0) throw std::invalid_argument("n*d must be even for a regular graph");
    if (d >= n) throw std::invalid_argument("degree must be below n");
    for (std::uint64_t attempt = 0;; ++attempt) {
        Rng rng(mix_seed(seed, attempt));
        std::vector<int> stubs;
        stubs.reserve(static_cast<std::size_t>(n) * d);
        for (int v = 0; v < n; ++v)
            for (int k = 0; k < d; ++k) stubs.push_back(v);
        rng.shuffle(stubs);
        TargetGraph h(n);
        bool ok = true;
        for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
            int u = stubs[i], v = stubs[i + 1];
            if (u == v || h.has_edge(u, v)) {
                ok = false;
                break;
            }
            h.add_edge(u, v);
        }
        if (ok) return h;
        if (attempt > 10000) throw std::runtime_error("regular graph sampling did not converge");
    }
}

// Family specs: "path:n", "cycle:n", "matching:k", "complete:n",
// "random:cap:n:seed", "random-regular:d:n:seed". Short names K6, P10,
// C12, M3 are also accepted.
inline TargetGraph parse_target_spec(const std::string& spec) {
    if (spec.find('+') != std::string::npos) {
        std::vector<TargetGraph> parts;
        std::size_t pos = 0;
        while (pos <= spec.size()) {
            std::size_t c = spec.find('+', pos);
            if (c == std::string::npos) c = spec.size();
            parts.push_back(parse_target_spec(spec.substr(pos, c - pos)));
            pos = c + 1;
        }
        return disjoint_union(parts);
    }
    if (!spec.empty() && (spec[0] == 'K' || spec[0] == 'P' || spec[0] == 'C' || spec[0] == 'M') &&
        spec.find(':') == std::string::npos && spec.size() > 1 &&
        std::all_of(spec.begin() + 1, spec.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        int v = std::stoi(spec.substr(1));
        switch (spec[0]) {
            case 'K': return complete_graph(v);
            case 'P': return path_graph(v);
            case 'C': return cycle_graph(v);
            case 'M': return matching_graph(v);
        }
    }
    std::vector<std::string> tok;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        std::size_t c = spec.find(':', pos);
        if (c == std::string::npos) c = spec.size();
        tok.push_back(spec.substr(pos, c - pos));
        pos = c + 1;
    }
    auto need = [&](std::size_t k) {
        if (tok.size() != k) throw std::invalid_argument("malformed target spec: " + spec);
    };
    const std::string& kind = tok[0];
    if (kind == "path") { need(2); return path_graph(std::stoi(tok[1])); }
    if (kind == "cycle") { need(2); return cycle_graph(std::stoi(tok[1])); }
    if (kind == "matching") { need(2); return matching_graph(std::stoi(tok[1])); }
    if (kind == "complete") { need(2); return complete_graph(std::stoi(tok[1])); }
    if (kind == "random") {
        need(4);
        return random_bounded_degree(std::stoi(tok[2]), std::stoi(tok[1]), 0.5,
                                     std::stoull(tok[3]));
    }
    if (kind == "random-regular") {
        need(4);
        return random_regular(std::stoi(tok[2]), std::stoi(tok[1]), std::stoull(tok[3]));
    }
    throw std::invalid_argument("unknown target spec: " + spec);
}

}  // namespace monoembed
