#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "monoembed/graph.hpp"
#include "monoembed/properties.hpp"
#include "monoembed/rng.hpp"

namespace monoembed {

struct PartClusters {
    std::vector<int> exceptional;
    std::vector<std::vector<int>> clusters;
};

// Each part split into t equal clusters plus a small exceptional set.
// `certified` records whether the sampled irregular fraction reached eps
// before the cluster budget ran out; the boundedness fields are a side
// audit (pair densities of eps*N-sized subsets against the cap lambda=2).
struct RegularityPartition {
    int t = 1;
    double eps = 0.0;
    std::vector<PartClusters> parts;
    bool certified = true;
    double irregular_fraction = 0.0;  // sampled irregular pairs / t^2
    bool bounded = true;
    double max_pair_density = 0.0;

    std::size_t cluster_size() const {
        if (parts.empty() || parts.front().clusters.empty()) return 0;
        return parts.front().clusters.front().size();
    }
    VertexSet cluster_set(int part, int c) const {
        return {part, parts.at(static_cast<std::size_t>(part))
                          .clusters.at(static_cast<std::size_t>(c))};
    }
};

inline void validate_partition(const MultipartiteGraph& g, const RegularityPartition& P) {
    if (P.t < 1) throw std::invalid_argument("partition needs t >= 1");
    if (static_cast<int>(P.parts.size()) != g.r())
        throw std::invalid_argument("partition part count mismatch");
    std::size_t size = P.cluster_size();
    for (int i = 0; i < g.r(); ++i) {
        const auto& pc = P.parts[static_cast<std::size_t>(i)];
        if (static_cast<int>(pc.clusters.size()) != P.t)
            throw std::invalid_argument("cluster count differs between parts");
        if (static_cast<double>(pc.exceptional.size()) >
            P.eps * static_cast<double>(g.N()) + 1e-9)
            throw std::invalid_argument("exceptional set exceeds eps*N");
        std::vector<char> seen(static_cast<std::size_t>(g.N()), 0);
        auto mark = [&](int v) {
            if (v < 0 || v >= g.N()) throw std::invalid_argument("partition vertex outside part");
            if (seen[static_cast<std::size_t>(v)]++)
                throw std::invalid_argument("partition repeats a vertex");
        };
        for (int v : pc.exceptional) mark(v);
        for (const auto& c : pc.clusters) {
            if (c.size() != size)
                throw std::invalid_argument("clusters are not equal-sized");
            for (int v : c) mark(v);
        }
        for (char s : seen)
            if (!s) throw std::invalid_argument("partition misses a vertex");
    }
}

inline nlohmann::json partition_to_json(const RegularityPartition& P) {
    nlohmann::json parts = nlohmann::json::array();
    for (const auto& pc : P.parts)
        parts.push_back({{"exceptional", pc.exceptional}, {"clusters", pc.clusters}});
    return {{"t", P.t}, {"eps", P.eps}, {"parts", parts}};
}

inline RegularityPartition partition_from_json(const nlohmann::json& j) {
    RegularityPartition P;
    P.t = j.at("t").get<int>();
    P.eps = j.at("eps").get<double>();
    for (const auto& pj : j.at("parts")) {
        PartClusters pc;
        pc.exceptional = pj.at("exceptional").get<std::vector<int>>();
        pc.clusters = pj.at("clusters").get<std::vector<std::vector<int>>>();
        P.parts.push_back(std::move(pc));
    }
    return P;
}

namespace reg_detail {

struct IrregularRecord {
    int pi, ci, pj, cj;
    std::vector<int> xsub, ysub;
};

// One full sampled certification sweep over all cross-part cluster pairs.
inline std::vector<IrregularRecord> audit_round(const MultipartiteGraph& g,
                                                const RegularityPartition& P, double p,
                                                double eps, std::uint64_t audit,
                                                std::uint64_t seed, std::uint64_t round) {
    std::vector<IrregularRecord> bad;
    for (int i = 0; i < g.r(); ++i)
        for (int j = i + 1; j < g.r(); ++j)
            for (int a = 0; a < P.t; ++a)
                for (int b = 0; b < P.t; ++b) {
                    auto cert = check_regular_pair(
                        g, P.cluster_set(i, a), P.cluster_set(j, b), p, eps,
                        CheckMode::Sampled(audit, mix_seed(seed, round,
                                                           static_cast<std::uint64_t>(i) << 24 |
                                                               static_cast<std::uint64_t>(j) << 16 |
                                                               static_cast<std::uint64_t>(a) << 8 |
                                                               static_cast<std::uint64_t>(b))));
                    if (cert.verdict == Verdict::Violated) {
                        IrregularRecord rec{i, a, j, b, {}, {}};
                        if (cert.witness) {
                            rec.xsub = cert.witness->xsub;
                            rec.ysub = cert.witness->ysub;
                        }
                        bad.push_back(std::move(rec));
                    }
                }
    return bad;
}

}  // namespace reg_detail

// Witness-driven iterative refinement: start from an equitable t0-split,
// certify all cluster pairs with the sampled checker, and while the
// irregular fraction exceeds eps halve every cluster — ordering marked
// clusters so that irregularity witnesses land in their own half. Stops
// (uncertified) rather than exceed T0 clusters or the eps*N exceptional
// budget.
inline RegularityPartition refine_partition(const MultipartiteGraph& g, double p, double eps,
                                            int t0, int T0, std::uint64_t audit,
                                            std::uint64_t seed) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps outside (0,1)");
    if (t0 < 1 || T0 < t0) throw std::invalid_argument("need 1 <= t0 <= T0");
    if (g.N() < t0) throw std::invalid_argument("fewer vertices than clusters");
    if (p <= 0.0) throw std::invalid_argument("refinement needs p > 0");

    RegularityPartition P;
    P.t = t0;
    P.eps = eps;
    std::size_t m = static_cast<std::size_t>(g.N()) / static_cast<std::size_t>(t0);
    for (int i = 0; i < g.r(); ++i) {
        PartClusters pc;
        int v = 0;
        for (int a = 0; a < t0; ++a) {
            std::vector<int> c(m);
            std::iota(c.begin(), c.end(), v);
            v += static_cast<int>(m);
            pc.clusters.push_back(std::move(c));
        }
        for (; v < g.N(); ++v) pc.exceptional.push_back(v);
        P.parts.push_back(std::move(pc));
    }

    for (std::uint64_t round = 0;; ++round) {
        auto bad = reg_detail::audit_round(g, P, p, eps, audit, seed, round);
        P.irregular_fraction =
            static_cast<double>(bad.size()) / (static_cast<double>(P.t) * P.t);
        if (P.irregular_fraction <= eps + 1e-12) {
            P.certified = true;
            break;
        }
        m = P.cluster_size();
        std::size_t m_new = m / 2;
        std::size_t spill = m - 2 * m_new;
        if (2 * P.t > T0 || m_new == 0 ||
            static_cast<double>(P.parts[0].exceptional.size() + spill * P.t) >
                eps * static_cast<double>(g.N()) + 1e-9) {
            P.certified = false;
            break;
        }

        // At most 3 witness marks per cluster steer the split.
        std::map<std::pair<int, int>, std::vector<const std::vector<int>*>> marks;
        for (const auto& rec : bad) {
            auto& mi = marks[{rec.pi, rec.ci}];
            if (mi.size() < 3 && !rec.xsub.empty()) mi.push_back(&rec.xsub);
            auto& mj = marks[{rec.pj, rec.cj}];
            if (mj.size() < 3 && !rec.ysub.empty()) mj.push_back(&rec.ysub);
        }
        for (int i = 0; i < g.r(); ++i) {
            PartClusters next;
            next.exceptional = P.parts[static_cast<std::size_t>(i)].exceptional;
            for (int a = 0; a < P.t; ++a) {
                const auto& members = P.parts[static_cast<std::size_t>(i)]
                                          .clusters[static_cast<std::size_t>(a)];
                std::vector<int> ordered;
                auto it = marks.find({i, a});
                if (it != marks.end()) {
                    std::vector<char> taken(members.size(), 0);
                    std::map<int, std::size_t> pos;
                    for (std::size_t q = 0; q < members.size(); ++q) pos[members[q]] = q;
                    for (const auto* w : it->second)
                        for (int v : *w) {
                            auto pit = pos.find(v);
                            if (pit != pos.end() && !taken[pit->second]) {
                                taken[pit->second] = 1;
                                ordered.push_back(v);
                            }
                        }
                    for (std::size_t q = 0; q < members.size(); ++q)
                        if (!taken[q]) ordered.push_back(members[q]);
                } else {
                    ordered = members;
                }
                next.clusters.emplace_back(ordered.begin(),
                                           ordered.begin() + static_cast<long>(m_new));
                next.clusters.emplace_back(ordered.begin() + static_cast<long>(m_new),
                                           ordered.begin() + static_cast<long>(2 * m_new));
                next.exceptional.insert(next.exceptional.end(),
                                        ordered.begin() + static_cast<long>(2 * m_new),
                                        ordered.end());
            }
            P.parts[static_cast<std::size_t>(i)] = std::move(next);
        }
        P.t *= 2;
    }

    // Boundedness side audit: eps*N-sized subset pairs against lambda = 2.
    {
        auto s = static_cast<std::size_t>(
            std::ceil(eps * static_cast<double>(g.N()) - 1e-9));
        s = std::max<std::size_t>(s, 1);
        Rng rng(mix_seed(seed, 0xb0, 0));
        for (int trial = 0; trial < 32; ++trial) {
            int i = static_cast<int>(rng.below(static_cast<std::size_t>(g.r())));
            int j = static_cast<int>(rng.below(static_cast<std::size_t>(g.r() - 1)));
            if (j >= i) ++j;
            VertexSet xs{i, rng.sample_indices(static_cast<std::size_t>(g.N()), s)};
            VertexSet ys{j, rng.sample_indices(static_cast<std::size_t>(g.N()), s)};
            double d = pair_density(g, xs, ys, p);
            P.max_pair_density = std::max(P.max_pair_density, d);
        }
        P.bounded = P.max_pair_density <= 2.0;
    }
    return P;
}

struct ReducedNode {
    int part = 0;
    int cluster = 0;
    friend bool operator==(const ReducedNode&, const ReducedNode&) = default;
};

// Cluster-level graph: one node per non-exceptional cluster, an edge when
// the sampled certificate passes. irregular[i*r+j] records the failed
// certifications per part pair.
struct ReducedGraph {
    int r = 0, t = 0;
    std::size_t cluster_size = 0;
    std::vector<std::vector<char>> adj;
    std::vector<std::uint64_t> irregular;

    int nodes() const { return r * t; }
    int node(int part, int cluster) const { return part * t + cluster; }
    ReducedNode unnode(int id) const { return {id / t, id % t}; }
    bool adjacent(int u, int v) const {
        return adj[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)];
    }
    int degree(int u) const {
        int d = 0;
        for (int v = 0; v < nodes(); ++v) d += adjacent(u, v);
        return d;
    }
    std::uint64_t edges() const {
        std::uint64_t e = 0;
        for (int u = 0; u < nodes(); ++u)
            for (int v = u + 1; v < nodes(); ++v) e += adjacent(u, v);
        return e;
    }
    std::uint64_t missing(int i, int j) const {
        std::uint64_t present = 0;
        for (int a = 0; a < t; ++a)
            for (int b = 0; b < t; ++b) present += adjacent(node(i, a), node(j, b));
        return static_cast<std::uint64_t>(t) * static_cast<std::uint64_t>(t) - present;
    }
};

inline ReducedGraph reduced_graph(const MultipartiteGraph& g, const RegularityPartition& P,
                                  double p, double eps, std::uint64_t audit,
                                  std::uint64_t seed) {
    validate_partition(g, P);
    ReducedGraph F;
    F.r = g.r();
    F.t = P.t;
    F.cluster_size = P.cluster_size();
    F.adj.assign(static_cast<std::size_t>(F.nodes()),
                 std::vector<char>(static_cast<std::size_t>(F.nodes()), 0));
    F.irregular.assign(static_cast<std::size_t>(F.r) * F.r, 0);
    auto bad = reg_detail::audit_round(g, P, p, eps, audit, seed, 0x5eed);
    std::set<std::pair<int, int>> badset;
    for (const auto& rec : bad) {
        badset.insert({F.node(rec.pi, rec.ci), F.node(rec.pj, rec.cj)});
        ++F.irregular[static_cast<std::size_t>(rec.pi) * F.r + rec.pj];
    }
    for (int i = 0; i < F.r; ++i)
        for (int j = i + 1; j < F.r; ++j)
            for (int a = 0; a < F.t; ++a)
                for (int b = 0; b < F.t; ++b)
                    if (!badset.count({F.node(i, a), F.node(j, b)})) {
                        F.adj[static_cast<std::size_t>(F.node(i, a))]
                             [static_cast<std::size_t>(F.node(j, b))] = 1;
                        F.adj[static_cast<std::size_t>(F.node(j, b))]
                             [static_cast<std::size_t>(F.node(i, a))] = 1;
                    }
    return F;
}

struct CliqueSearch {
    bool found = false;
    std::vector<ReducedNode> clique;
    bool budget_exhausted = false;
    std::uint64_t nodes_expanded = 0;
};

namespace reg_detail {

template <class Fn>
bool clique_dfs(const ReducedGraph& F, int r_target, int part,
                const std::vector<std::vector<int>>& order, std::vector<int>& chosen,
                std::uint64_t budget, CliqueSearch& out, Fn&& fn) {
    if (static_cast<int>(chosen.size()) == r_target) {
        std::vector<ReducedNode> sel;
        sel.reserve(chosen.size());
        for (int id : chosen) sel.push_back(F.unnode(id));
        for (std::size_t a = 0; a < chosen.size(); ++a)
            for (std::size_t b = a + 1; b < chosen.size(); ++b)
                if (!F.adjacent(chosen[a], chosen[b]))
                    throw std::logic_error("clique search produced a non-clique");
        if (fn(sel)) {
            out.found = true;
            out.clique = std::move(sel);
            return true;
        }
        return false;
    }
    if (part >= F.r) return false;
    int needed = r_target - static_cast<int>(chosen.size());
    if (F.r - part < needed) return false;
    if (++out.nodes_expanded > budget) {
        out.budget_exhausted = true;
        return false;
    }
    for (int id : order[static_cast<std::size_t>(part)]) {
        bool ok = true;
        for (int c : chosen)
            if (!F.adjacent(c, id)) {
                ok = false;
                break;
            }
        if (!ok) continue;
        chosen.push_back(id);
        if (clique_dfs(F, r_target, part + 1, order, chosen, budget, out, fn)) return true;
        chosen.pop_back();
        if (out.budget_exhausted) return false;
    }
    // Skipping this part is allowed when enough later parts remain.
    if (F.r - part - 1 >= needed)
        return clique_dfs(F, r_target, part + 1, order, chosen, budget, out, fn);
    return false;
}

}  // namespace reg_detail

// Backtracking transversal-clique search: parts in order, clusters within
// a part by reduced-graph degree descending. fn is called on every clique
// found and may reject it (return false) to continue the enumeration.
template <class Fn>
CliqueSearch for_each_regular_clique(const ReducedGraph& F, int r_target, std::uint64_t budget,
                                     Fn&& fn) {
    if (r_target < 1 || r_target > F.r)
        throw std::invalid_argument("clique size outside [1, r]");
    CliqueSearch out;
    std::vector<std::vector<int>> order(static_cast<std::size_t>(F.r));
    for (int i = 0; i < F.r; ++i) {
        for (int a = 0; a < F.t; ++a) order[static_cast<std::size_t>(i)].push_back(F.node(i, a));
        std::stable_sort(order[static_cast<std::size_t>(i)].begin(),
                         order[static_cast<std::size_t>(i)].end(),
                         [&](int u, int v) { return F.degree(u) > F.degree(v); });
    }
    std::vector<int> chosen;
    reg_detail::clique_dfs(F, r_target, 0, order, chosen, budget, out, fn);
    return out;
}

inline CliqueSearch find_regular_clique(const ReducedGraph& F, int r_target,
                                        std::uint64_t budget = 200000) {
    return for_each_regular_clique(F, r_target, budget,
                                   [](const std::vector<ReducedNode>&) { return true; });
}

// The chosen monochromatic clusters for embedding: pairwise certified
// regular in the winning view and pairwise at least 1/3 p-dense.
struct CliqueSelection {
    Color color = Color::Red;
    std::vector<ReducedNode> nodes;
    std::vector<VertexSet> clusters;
    double density_floor = 0.0;
};

struct SelectionOutcome {
    std::optional<CliqueSelection> selection;
    int best_red = 0, best_blue = 0;
    std::string note;
};

// Density 2-coloring of the chosen K_r of clusters (a cluster pair is Red
// when its red p-density is at least its blue one), then a monochromatic
// K_{delta_bar} whose pairs re-certify (eps0, p)-regular and >= 1/3 dense
// in the winning view. Exhaustive over cluster subsets for r <= 12,
// greedy with restarts above.
inline SelectionOutcome select_dense_mono_clique(const MultipartiteGraph& g,
                                                 const EdgeColoring& col,
                                                 const RegularityPartition& P,
                                                 const std::vector<ReducedNode>& kr, double p,
                                                 double eps0, int delta_bar,
                                                 std::uint64_t audit, std::uint64_t seed) {
    const int rs = static_cast<int>(kr.size());
    SelectionOutcome out;
    if (delta_bar < 1) throw std::invalid_argument("delta_bar must be positive");
    if (delta_bar > rs) {
        out.note = "fewer clusters than classes";
        return out;
    }
    {
        std::set<int> parts;
        for (const auto& n : kr)
            if (!parts.insert(n.part).second)
                throw std::invalid_argument("clique selection repeats a part");
    }

    std::vector<VertexSet> sets;
    sets.reserve(kr.size());
    for (const auto& n : kr) sets.push_back(P.cluster_set(n.part, n.cluster));

    // red[i][j] = density-coloring verdict via red vs blue edge counts.
    std::vector<std::vector<char>> red(static_cast<std::size_t>(rs),
                                       std::vector<char>(static_cast<std::size_t>(rs), 0));
    for (int i = 0; i < rs; ++i)
        for (int j = i + 1; j < rs; ++j) {
            std::uint64_t er = 0, eb = 0;
            for (int a : sets[static_cast<std::size_t>(i)].members)
                for (int b : sets[static_cast<std::size_t>(j)].members) {
                    Vertex u{sets[static_cast<std::size_t>(i)].part, a};
                    Vertex v{sets[static_cast<std::size_t>(j)].part, b};
                    if (!g.has_edge(u, v)) continue;
                    (col.is_red_slot(u, v) ? er : eb) += 1;
                }
            red[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                red[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = er >= eb;
        }

    auto mono = [&](std::uint32_t mask, bool want_red) {
        std::vector<int> idx;
        for (int i = 0; i < rs; ++i)
            if (mask >> i & 1) idx.push_back(i);
        for (std::size_t a = 0; a < idx.size(); ++a)
            for (std::size_t b = a + 1; b < idx.size(); ++b)
                if (static_cast<bool>(red[static_cast<std::size_t>(idx[a])]
                                         [static_cast<std::size_t>(idx[b])]) != want_red)
                    return false;
        return true;
    };

    std::optional<MultipartiteGraph> views[2];
    auto view_of = [&](Color c) -> const MultipartiteGraph& {
        auto& slot = views[c == Color::Red ? 0 : 1];
        if (!slot) slot = monochrome_view(g, col, c);
        return *slot;
    };

    auto certify = [&](std::uint32_t mask, Color color) -> std::optional<CliqueSelection> {
        const auto& view = view_of(color);
        CliqueSelection sel;
        sel.color = color;
        sel.density_floor = std::numeric_limits<double>::infinity();
        std::vector<int> idx;
        for (int i = 0; i < rs; ++i)
            if (mask >> i & 1) idx.push_back(i);
        for (std::size_t a = 0; a < idx.size(); ++a)
            for (std::size_t b = a + 1; b < idx.size(); ++b) {
                const auto& A = sets[static_cast<std::size_t>(idx[a])];
                const auto& B = sets[static_cast<std::size_t>(idx[b])];
                double d = pair_density(view, A, B, p);
                if (d < 1.0 / 3.0 - 1e-12) return std::nullopt;
                sel.density_floor = std::min(sel.density_floor, d);
                auto cert = check_regular_pair(
                    view, A, B, p, eps0,
                    CheckMode::Sampled(audit, mix_seed(seed, mask, a << 8 | b)));
                if (cert.verdict != Verdict::Holds) return std::nullopt;
            }
        for (int i : idx) {
            sel.nodes.push_back(kr[static_cast<std::size_t>(i)]);
            sel.clusters.push_back(sets[static_cast<std::size_t>(i)]);
        }
        return sel;
    };

    bool candidate_seen = false;
    if (rs <= 12) {
        for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << rs); ++mask) {
            int size = std::popcount(mask);
            for (bool want_red : {true, false}) {
                if (!mono(mask, want_red)) continue;
                auto& best = want_red ? out.best_red : out.best_blue;
                best = std::max(best, size);
                if (size != delta_bar) continue;
                candidate_seen = true;
                if (auto sel = certify(mask, want_red ? Color::Red : Color::Blue)) {
                    out.selection = std::move(sel);
                    return out;
                }
            }
        }
    } else {
        Rng rng(mix_seed(seed, 0x9e1ec7));
        std::vector<int> perm(static_cast<std::size_t>(rs));
        std::iota(perm.begin(), perm.end(), 0);
        for (int restart = 0; restart < 200; ++restart) {
            rng.shuffle(perm);
            for (bool want_red : {true, false}) {
                std::uint32_t mask = 0;
                int size = 0;
                for (int i : perm) {
                    std::uint32_t trial = mask | (std::uint32_t{1} << i);
                    if (mono(trial, want_red)) {
                        mask = trial;
                        ++size;
                    }
                    if (size == delta_bar) break;
                }
                auto& best = want_red ? out.best_red : out.best_blue;
                best = std::max(best, size);
                if (size < delta_bar) continue;
                candidate_seen = true;
                if (auto sel = certify(mask, want_red ? Color::Red : Color::Blue)) {
                    out.selection = std::move(sel);
                    return out;
                }
            }
        }
    }
    out.note = candidate_seen ? "no candidate clique re-certified"
                              : "no monochromatic clique of the required size";
    return out;
}

}  // namespace monoembed
