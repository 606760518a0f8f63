#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "monoembed/target.hpp"

namespace monoembed {

// Third power: edges between vertices at H-distance 1..3, built by a
// depth-3 breadth-first sweep from every vertex.
inline TargetGraph cube_graph(const TargetGraph& h) {
    TargetGraph h3(h.n);
    std::vector<int> dist(static_cast<std::size_t>(h.n));
    for (int s = 0; s < h.n; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        dist[static_cast<std::size_t>(s)] = 0;
        std::queue<int> q;
        q.push(s);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            if (dist[static_cast<std::size_t>(u)] == 3) continue;
            for (int v : h.adj[static_cast<std::size_t>(u)])
                if (dist[static_cast<std::size_t>(v)] < 0) {
                    dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
                    q.push(v);
                }
        }
        for (int v = s + 1; v < h.n; ++v)
            if (dist[static_cast<std::size_t>(v)] > 0) h3.add_edge(s, v);
    }
    int d = h.max_degree();
    if (d > 0 && h3.max_degree() > d * d * d - d * d + d)
        throw std::logic_error("third-power degree bound failed");
    return h3;
}

namespace hprep_detail {

// Largest-saturation-first greedy coloring; ties by degree then index.
inline std::vector<int> dsatur(const TargetGraph& g) {
    const int n = g.n;
    std::vector<int> color(static_cast<std::size_t>(n), -1);
    std::vector<std::set<int>> sat(static_cast<std::size_t>(n));
    for (int step = 0; step < n; ++step) {
        int pick = -1;
        for (int v = 0; v < n; ++v) {
            if (color[static_cast<std::size_t>(v)] >= 0) continue;
            if (pick < 0) {
                pick = v;
                continue;
            }
            auto sv = sat[static_cast<std::size_t>(v)].size();
            auto sp = sat[static_cast<std::size_t>(pick)].size();
            if (sv > sp || (sv == sp && g.degree(v) > g.degree(pick))) pick = v;
        }
        int c = 0;
        while (sat[static_cast<std::size_t>(pick)].count(c)) ++c;
        color[static_cast<std::size_t>(pick)] = c;
        for (int u : g.adj[static_cast<std::size_t>(pick)]) sat[static_cast<std::size_t>(u)].insert(c);
    }
    return color;
}

// One repair pass: try to clear the top color class by direct recoloring
// or a single Kempe-chain swap per vertex.
inline bool kempe_repair(const TargetGraph& g, std::vector<int>& color, int top) {
    auto neighbors_with = [&](int v, int c) {
        std::vector<int> out;
        for (int u : g.adj[static_cast<std::size_t>(v)])
            if (color[static_cast<std::size_t>(u)] == c) out.push_back(u);
        return out;
    };
    for (int v = 0; v < g.n; ++v) {
        if (color[static_cast<std::size_t>(v)] != top) continue;
        bool fixed = false;
        for (int a = 0; a < top && !fixed; ++a) {
            auto na = neighbors_with(v, a);
            if (na.empty()) {
                color[static_cast<std::size_t>(v)] = a;
                fixed = true;
                break;
            }
            if (na.size() != 1) continue;
            for (int b = 0; b < top && !fixed; ++b) {
                if (b == a) continue;
                // Flip the (a,b)-component containing na[0]; accept when
                // v's neighborhood then frees color a.
                std::vector<int> comp;
                std::set<int> in_comp{na[0]};
                std::queue<int> q;
                q.push(na[0]);
                while (!q.empty()) {
                    int u = q.front();
                    q.pop();
                    comp.push_back(u);
                    for (int w : g.adj[static_cast<std::size_t>(u)]) {
                        int cw = color[static_cast<std::size_t>(w)];
                        if ((cw == a || cw == b) && !in_comp.count(w)) {
                            in_comp.insert(w);
                            q.push(w);
                        }
                    }
                }
                for (int u : comp)
                    color[static_cast<std::size_t>(u)] =
                        color[static_cast<std::size_t>(u)] == a ? b : a;
                if (neighbors_with(v, a).empty()) {
                    color[static_cast<std::size_t>(v)] = a;
                    fixed = true;
                } else {
                    for (int u : comp)
                        color[static_cast<std::size_t>(u)] =
                            color[static_cast<std::size_t>(u)] == a ? b : a;
                }
            }
        }
        if (!fixed) return false;
    }
    return true;
}

}  // namespace hprep_detail

struct PowerColoring {
    std::vector<int> f;
    int colors_used = 0;
    bool brooks_miss = false;
};

// Proper coloring of the power graph, aiming for its max degree many
// colors (Brooks' bound); max-degree + 1 with the miss flag recorded when
// the greedy + one repair pass does not get there.
inline PowerColoring color_power(const TargetGraph& h3) {
    PowerColoring out;
    out.f = hprep_detail::dsatur(h3);
    out.colors_used =
        out.f.empty() ? 0 : *std::max_element(out.f.begin(), out.f.end()) + 1;
    int d = h3.max_degree();
    if (d >= 1 && out.colors_used == d + 1) {
        auto trial = out.f;
        if (hprep_detail::kempe_repair(h3, trial, d)) {
            out.f = trial;
            out.colors_used = d;
        }
    }
    out.brooks_miss = d >= 1 && out.colors_used > d;
    return out;
}

// Classes by (f-color, left-degree): the number of H-neighbors carrying a
// smaller f-color. g is the class index; ldeg[w][l] counts H-neighbors of
// w in classes before l.
struct PrepPlan {
    int n = 0;
    int delta = 0;
    int colors_used = 0;
    bool brooks_miss = false;
    std::vector<int> f;
    std::vector<int> g;
    std::vector<std::vector<int>> classes;
    std::vector<std::vector<int>> ldeg;

    int class_count() const { return static_cast<int>(classes.size()); }
};

inline PrepPlan build_classes(const TargetGraph& h, const PowerColoring& pc) {
    auto h3 = cube_graph(h);
    for (auto [u, v] : h3.edges())
        if (pc.f[static_cast<std::size_t>(u)] == pc.f[static_cast<std::size_t>(v)])
            throw std::domain_error("coloring not proper on the third power");

    PrepPlan plan;
    plan.n = h.n;
    plan.delta = h.max_degree();
    plan.colors_used = pc.colors_used;
    plan.brooks_miss = pc.brooks_miss;
    plan.f = pc.f;

    std::vector<std::pair<int, int>> key(static_cast<std::size_t>(h.n));
    for (int w = 0; w < h.n; ++w) {
        int lf = 0;
        for (int x : h.adj[static_cast<std::size_t>(w)])
            lf += pc.f[static_cast<std::size_t>(x)] < pc.f[static_cast<std::size_t>(w)];
        key[static_cast<std::size_t>(w)] = {pc.f[static_cast<std::size_t>(w)], lf};
    }
    std::map<std::pair<int, int>, int> index;
    for (const auto& k : key) index.emplace(k, 0);
    int next = 0;
    for (auto& [k, id] : index) id = next++;
    plan.g.resize(static_cast<std::size_t>(h.n));
    plan.classes.assign(static_cast<std::size_t>(next), {});
    for (int w = 0; w < h.n; ++w) {
        int c = index.at(key[static_cast<std::size_t>(w)]);
        plan.g[static_cast<std::size_t>(w)] = c;
        plan.classes[static_cast<std::size_t>(c)].push_back(w);
    }

    plan.ldeg.assign(static_cast<std::size_t>(h.n),
                     std::vector<int>(static_cast<std::size_t>(next) + 1, 0));
    for (int w = 0; w < h.n; ++w)
        for (int l = 1; l <= next; ++l) {
            int cnt = 0;
            for (int x : h.adj[static_cast<std::size_t>(w)])
                cnt += plan.g[static_cast<std::size_t>(x)] < l;
            plan.ldeg[static_cast<std::size_t>(w)][static_cast<std::size_t>(l)] = cnt;
        }
    return plan;
}

inline PrepPlan prepare_target(const TargetGraph& h) {
    return build_classes(h, color_power(cube_graph(h)));
}

// Independent validation of a plan:
// (a) classes partition the vertex set and match g;
// (b) same-class vertices are at H-distance >= 4;
// (c) same-class vertices have disjoint, non-adjacent H-neighborhoods;
// (d) the ldeg table matches a direct recount;
// (e) within a class, the left-degree at the class's own prefix is shared.
inline bool verify_plan(const TargetGraph& h, const PrepPlan& plan,
                        std::vector<std::string>* violations = nullptr) {
    auto fail = [&](const std::string& msg) {
        if (violations) violations->push_back(msg);
        return false;
    };
    bool ok = true;

    std::vector<int> owner(static_cast<std::size_t>(h.n), -1);
    for (std::size_t c = 0; c < plan.classes.size(); ++c)
        for (int w : plan.classes[c]) {
            if (w < 0 || w >= h.n || owner[static_cast<std::size_t>(w)] >= 0) {
                ok = fail("(a) classes do not partition the vertex set");
                continue;
            }
            owner[static_cast<std::size_t>(w)] = static_cast<int>(c);
        }
    for (int w = 0; w < h.n; ++w)
        if (owner[static_cast<std::size_t>(w)] < 0 ||
            (static_cast<std::size_t>(w) < plan.g.size() &&
             plan.g[static_cast<std::size_t>(w)] != owner[static_cast<std::size_t>(w)]))
            ok = fail("(a) class assignment mismatch at vertex " + std::to_string(w));
    if (!ok) return false;

    std::vector<int> dist(static_cast<std::size_t>(h.n));
    for (int s = 0; s < h.n; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        dist[static_cast<std::size_t>(s)] = 0;
        std::queue<int> q;
        q.push(s);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            if (dist[static_cast<std::size_t>(u)] == 3) continue;
            for (int v : h.adj[static_cast<std::size_t>(u)])
                if (dist[static_cast<std::size_t>(v)] < 0) {
                    dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
                    q.push(v);
                }
        }
        for (int v = s + 1; v < h.n; ++v)
            if (dist[static_cast<std::size_t>(v)] > 0 &&
                owner[static_cast<std::size_t>(v)] == owner[static_cast<std::size_t>(s)])
                ok = fail("(b) vertices " + std::to_string(s) + "," + std::to_string(v) +
                          " share a class at distance " +
                          std::to_string(dist[static_cast<std::size_t>(v)]));
    }

    for (const auto& cls : plan.classes)
        for (std::size_t i = 0; i < cls.size(); ++i)
            for (std::size_t j = i + 1; j < cls.size(); ++j) {
                const auto& nu = h.adj[static_cast<std::size_t>(cls[i])];
                const auto& nv = h.adj[static_cast<std::size_t>(cls[j])];
                std::vector<int> common;
                std::set_intersection(nu.begin(), nu.end(), nv.begin(), nv.end(),
                                      std::back_inserter(common));
                if (!common.empty())
                    ok = fail("(c) shared neighborhood between " + std::to_string(cls[i]) +
                              " and " + std::to_string(cls[j]));
                for (int a : nu)
                    for (int b : nv)
                        if (h.has_edge(a, b))
                            ok = fail("(c) adjacent neighborhoods between " +
                                      std::to_string(cls[i]) + " and " + std::to_string(cls[j]));
            }

    int K = plan.class_count();
    for (int w = 0; w < h.n; ++w) {
        if (plan.ldeg[static_cast<std::size_t>(w)].size() != static_cast<std::size_t>(K) + 1) {
            ok = fail("(d) ldeg row size mismatch at vertex " + std::to_string(w));
            continue;
        }
        for (int l = 0; l <= K; ++l) {
            int cnt = 0;
            for (int x : h.adj[static_cast<std::size_t>(w)])
                cnt += owner[static_cast<std::size_t>(x)] < l;
            if (plan.ldeg[static_cast<std::size_t>(w)][static_cast<std::size_t>(l)] != cnt)
                ok = fail("(d) ldeg mismatch at vertex " + std::to_string(w) + " level " +
                          std::to_string(l));
        }
    }

    for (int c = 0; c < K; ++c) {
        const auto& cls = plan.classes[static_cast<std::size_t>(c)];
        for (std::size_t i = 1; i < cls.size(); ++i)
            if (plan.ldeg[static_cast<std::size_t>(cls[i])][static_cast<std::size_t>(c)] !=
                plan.ldeg[static_cast<std::size_t>(cls[0])][static_cast<std::size_t>(c)])
                ok = fail("(e) class " + std::to_string(c) +
                          " members disagree on the class-prefix left-degree");
    }
    return ok;
}

inline nlohmann::json plan_to_json(const PrepPlan& plan) {
    return {{"n", plan.n},
            {"delta", plan.delta},
            {"colors_used", plan.colors_used},
            {"classes", plan.classes},
            {"ldeg", plan.ldeg},
            {"brooks_miss", plan.brooks_miss}};
}

inline PrepPlan plan_from_json(const nlohmann::json& j) {
    PrepPlan plan;
    plan.n = j.at("n").get<int>();
    plan.delta = j.at("delta").get<int>();
    plan.colors_used = j.at("colors_used").get<int>();
    plan.classes = j.at("classes").get<std::vector<std::vector<int>>>();
    plan.ldeg = j.at("ldeg").get<std::vector<std::vector<int>>>();
    plan.brooks_miss = j.at("brooks_miss").get<bool>();
    plan.g.assign(static_cast<std::size_t>(plan.n), -1);
    for (std::size_t c = 0; c < plan.classes.size(); ++c)
        for (int w : plan.classes[c])
            if (w >= 0 && w < plan.n) plan.g[static_cast<std::size_t>(w)] = static_cast<int>(c);
    return plan;
}

}  // namespace monoembed
