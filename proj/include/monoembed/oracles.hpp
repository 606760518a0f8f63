#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "monoembed/graph.hpp"
#include "monoembed/target.hpp"

namespace monoembed {

// Raised when an oracle is asked for an instance outside its exhaustive
// range. Oracles never approximate; past the budget they refuse.
struct OracleInfeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TuranResult {
    std::uint64_t max_edges = 0;
    MultipartiteGraph witness;  // r parts of k slots realizing the maximum
};

namespace oracle_detail {

// Iterative-deepening branch over transversal cliques: every clique-free
// subgraph corresponds to a deletion set hitting all k^r transversal
// cliques, and each unhit clique must lose one of its C(r,2) edges.
inline bool turan_dfs(const std::vector<std::uint64_t>& cliques, std::uint64_t deleted,
                      int depth_left, std::uint64_t& out_deleted) {
    const std::uint64_t* unhit = nullptr;
    for (const auto& c : cliques)
        if ((c & deleted) == 0) {
            unhit = &c;
            break;
        }
    if (!unhit) {
        out_deleted = deleted;
        return true;
    }
    if (depth_left == 0) return false;
    std::uint64_t rem = *unhit;
    while (rem) {
        std::uint64_t bit = rem & (~rem + 1);
        rem ^= bit;
        if (turan_dfs(cliques, deleted | bit, depth_left - 1, out_deleted)) return true;
    }
    return false;
}

}  // namespace oracle_detail

// Exact maximum edge count of a subgraph of the complete r-partite graph
// with k vertices per part containing no transversal r-clique, found by
// exhaustive search. Budget: r*k <= 9.
inline TuranResult turan_number(int r, int k) {
    if (r < 2 || k < 1) throw std::invalid_argument("turan_number needs r >= 2, k >= 1");
    if (r * k > 9)
        throw OracleInfeasible("turan oracle infeasible beyond r*k = 9 (got " +
                               std::to_string(r * k) + ")");
    struct Slot { int i, a, j, b; };
    std::vector<Slot> edges;
    auto edge_id = [&](int i, int a, int j, int b) {
        for (std::size_t t = 0; t < edges.size(); ++t) {
            const auto& e = edges[t];
            if (e.i == i && e.a == a && e.j == j && e.b == b) return t;
        }
        throw std::logic_error("edge lookup");
    };
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j)
            for (int a = 0; a < k; ++a)
                for (int b = 0; b < k; ++b) edges.push_back({i, a, j, b});

    std::vector<std::uint64_t> cliques;
    std::vector<int> pick(r, 0);
    while (true) {
        std::uint64_t mask = 0;
        for (int i = 0; i < r; ++i)
            for (int j = i + 1; j < r; ++j)
                mask |= std::uint64_t{1} << edge_id(i, pick[i], j, pick[j]);
        cliques.push_back(mask);
        int pos = r - 1;
        while (pos >= 0 && ++pick[pos] == k) pick[pos--] = 0;
        if (pos < 0) break;
    }

    std::uint64_t deleted = 0;
    for (int d = 0;; ++d) {
        if (oracle_detail::turan_dfs(cliques, 0, d, deleted)) break;
    }

    TuranResult res;
    res.witness = MultipartiteGraph(r, k);
    for (std::size_t t = 0; t < edges.size(); ++t)
        if (!(deleted >> t & 1))
            res.witness.add_edge({edges[t].i, edges[t].a}, {edges[t].j, edges[t].b});
    res.max_edges = res.witness.edge_count();
    return res;
}

struct ArrowResult {
    bool arrows = false;
    // When arrows is false: a complete red/blue edge coloring of g with no
    // monochromatic copy of h, as a parallel array over g.edges().
    std::vector<Color> witness;
    std::uint64_t nodes = 0;
};

namespace oracle_detail {

inline void enumerate_copies(const TargetGraph& g, const TargetGraph& h,
                             const std::vector<std::pair<int, int>>& gedges,
                             std::vector<std::uint64_t>& out) {
    std::vector<std::vector<std::size_t>> edge_at(g.n, std::vector<std::size_t>(g.n, SIZE_MAX));
    for (std::size_t t = 0; t < gedges.size(); ++t) {
        edge_at[gedges[t].first][gedges[t].second] = t;
        edge_at[gedges[t].second][gedges[t].first] = t;
    }
    std::vector<int> order(h.n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return h.degree(a) > h.degree(b); });
    std::vector<int> map(h.n, -1);
    std::vector<bool> used(g.n, false);
    std::unordered_set<std::uint64_t> seen;

    auto rec = [&](auto&& self, std::size_t pos) -> void {
        if (pos == order.size()) {
            std::uint64_t mask = 0;
            for (auto [u, v] : h.edges()) mask |= std::uint64_t{1} << edge_at[map[u]][map[v]];
            if (seen.insert(mask).second) out.push_back(mask);
            return;
        }
        int hv = order[pos];
        for (int gv = 0; gv < g.n; ++gv) {
            if (used[gv] || g.degree(gv) < h.degree(hv)) continue;
            bool ok = true;
            for (int hn : h.adj[hv])
                if (map[hn] != -1 && !g.has_edge(gv, map[hn])) { ok = false; break; }
            if (!ok) continue;
            map[hv] = gv;
            used[gv] = true;
            self(self, pos + 1);
            map[hv] = -1;
            used[gv] = false;
        }
    };
    rec(rec, 0);
}

}  // namespace oracle_detail

// Does every red/blue coloring of g's edges contain a monochromatic copy
// of h? Exhaustive search for a coloring avoiding both, with fail-first
// branching on the edge lying in the most near-monochromatic copies and a
// transposition table over partial colorings (no symmetry reduction).
// Budget: e(g) <= 20.
inline ArrowResult arrow_check(const TargetGraph& g, const TargetGraph& h) {
    auto gedges = g.edges();
    if (gedges.size() > 20)
        throw OracleInfeasible("arrow oracle infeasible beyond 20 edges (got " +
                               std::to_string(gedges.size()) + ")");
    if (h.edge_count() == 0) throw std::invalid_argument("arrow target needs at least one edge");

    std::vector<std::uint64_t> copies;
    oracle_detail::enumerate_copies(g, h, gedges, copies);

    ArrowResult res;
    if (copies.empty()) {
        // h does not occur in g at all; any coloring (say all red) avoids it.
        res.arrows = false;
        res.witness.assign(gedges.size(), Color::Red);
        return res;
    }

    const std::size_t m = gedges.size();
    std::uint64_t red = 0, blue = 0;
    std::unordered_set<std::uint64_t> visited;
    std::vector<Color> current(m, Color::Red);

    auto rec = [&](auto&& self, std::size_t colored) -> bool {
        ++res.nodes;
        for (auto c : copies) {
            if ((c & red) == c || (c & blue) == c) return false;
        }
        if (colored == m) {
            res.witness = current;
            return true;
        }
        std::uint64_t assigned = red | blue;
        if (!visited.insert(assigned | (red << 20)).second) return false;

        std::size_t best = SIZE_MAX;
        int best_score = -1;
        for (std::size_t t = 0; t < m; ++t) {
            if (assigned >> t & 1) continue;
            int score = 0;
            for (auto c : copies) {
                if (!(c >> t & 1)) continue;
                bool red_alive = (c & blue) == 0;
                bool blue_alive = (c & red) == 0;
                int open = std::popcount(c & ~assigned);
                if ((red_alive || blue_alive) && open <= 2) ++score;
            }
            if (score > best_score) { best_score = score; best = t; }
        }

        std::uint64_t bit = std::uint64_t{1} << best;
        current[best] = Color::Red;
        red |= bit;
        if (self(self, colored + 1)) return true;
        red ^= bit;
        current[best] = Color::Blue;
        blue |= bit;
        if (self(self, colored + 1)) return true;
        blue ^= bit;
        return false;
    };

    bool bad_found = rec(rec, 0);
    res.arrows = !bad_found;
    return res;
}

struct RegularityWitness {
    std::vector<int> xsub, ysub;
    double density = 0.0;
    double deviation = 0.0;
};

struct ExactRegularityResult {
    bool regular = true;
    double base_density = 0.0;
    double max_deviation = 0.0;
    RegularityWitness worst;
    std::uint64_t subpairs = 0;
};

// Ground-truth regularity check by full enumeration of all subset pairs
// with |X'| >= ceil(eps|X|), |Y'| >= ceil(eps|Y|), counting edges with
// nested loops. Budget: |X| + |Y| <= 18.
inline ExactRegularityResult exact_regularity(const MultipartiteGraph& g, const VertexSet& x,
                                              const VertexSet& y, double p, double eps) {
    if (x.part == y.part) throw std::invalid_argument("regularity needs distinct parts");
    if (x.members.empty() || y.members.empty())
        throw std::invalid_argument("regularity of an empty set");
    if (p <= 0.0) throw std::invalid_argument("regularity needs p > 0");
    if (eps <= 0.0 || eps > 1.0) throw std::invalid_argument("eps outside (0,1]");
    if (x.members.size() + y.members.size() > 18)
        throw OracleInfeasible("exact regularity beyond |X|+|Y| = 18");

    const auto& xs = x.members;
    const auto& ys = y.members;
    auto count_edges = [&](const std::vector<int>& xa, const std::vector<int>& ya) {
        std::uint64_t e = 0;
        for (int a : xa)
            for (int b : ya)
                if (g.has_edge({x.part, a}, {y.part, b})) ++e;
        return e;
    };
    auto density = [&](const std::vector<int>& xa, const std::vector<int>& ya) {
        return static_cast<double>(count_edges(xa, ya)) /
               (p * static_cast<double>(xa.size()) * static_cast<double>(ya.size()));
    };

    ExactRegularityResult res;
    res.base_density = density(xs, ys);
    auto wx = static_cast<std::size_t>(std::max(
        1.0, std::ceil(eps * static_cast<double>(xs.size()) - 1e-9)));
    auto wy = static_cast<std::size_t>(std::max(
        1.0, std::ceil(eps * static_cast<double>(ys.size()) - 1e-9)));

    std::vector<std::vector<int>> xsubs, ysubs;
    for (std::uint32_t mx = 1; mx < (1u << xs.size()); ++mx) {
        if (static_cast<std::size_t>(std::popcount(mx)) < wx) continue;
        std::vector<int> sub;
        for (std::size_t i = 0; i < xs.size(); ++i)
            if (mx >> i & 1) sub.push_back(xs[i]);
        xsubs.push_back(std::move(sub));
    }
    for (std::uint32_t my = 1; my < (1u << ys.size()); ++my) {
        if (static_cast<std::size_t>(std::popcount(my)) < wy) continue;
        std::vector<int> sub;
        for (std::size_t i = 0; i < ys.size(); ++i)
            if (my >> i & 1) sub.push_back(ys[i]);
        ysubs.push_back(std::move(sub));
    }

    for (const auto& xa : xsubs)
        for (const auto& ya : ysubs) {
            ++res.subpairs;
            double d = density(xa, ya);
            double dev = std::abs(d - res.base_density);
            if (dev > res.max_deviation) {
                res.max_deviation = dev;
                res.worst = {xa, ya, d, dev};
            }
        }
    res.regular = res.max_deviation <= eps;
    return res;
}

struct RamseyBound {
    std::optional<int> exact;
    std::uint64_t lower = 0;  // floor(2^{m/2}), probabilistic lower bound
    std::uint64_t upper = 0;  // C(2m-2, m-1), Erdos-Szekeres upper bound
};

inline std::uint64_t binomial_u64(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 num = 1;
    for (int i = 1; i <= k; ++i) num = num * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (num > static_cast<unsigned __int128>(UINT64_MAX))
        throw std::overflow_error("binomial exceeds 64 bits");
    return static_cast<std::uint64_t>(num);
}

// Two-color Ramsey numbers for complete graphs: exact for m <= 4, general
// bounds beyond.
inline RamseyBound ramsey_bound(int m) {
    if (m < 1) throw std::invalid_argument("ramsey_bound needs m >= 1");
    if (m > 34) throw OracleInfeasible("ramsey upper bound exceeds 64 bits beyond m = 34");
    RamseyBound b;
    static const int table[] = {1, 2, 6, 18};
    if (m <= 4) b.exact = table[m - 1];
    b.lower = static_cast<std::uint64_t>(std::floor(std::pow(2.0, static_cast<double>(m) / 2.0)));
    b.upper = binomial_u64(2 * m - 2, m - 1);
    return b;
}

}  // namespace monoembed
