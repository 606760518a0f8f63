#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "monoembed/bits.hpp"
#include "monoembed/constants.hpp"
#include "monoembed/graph.hpp"
#include "monoembed/hprep.hpp"
#include "monoembed/properties.hpp"
#include "monoembed/regularity.hpp"
#include "monoembed/rng.hpp"
#include "monoembed/target.hpp"

namespace monoembed {

inline constexpr const char* stage_size_floor = "size-floor";
inline constexpr const char* stage_denseness = "denseness";
inline constexpr const char* stage_hall = "hall";
inline constexpr const char* stage_clique_selection = "clique-selection";

// Machine-readable failure record; producing one is a run outcome, not an
// error path.
struct Diagnostic {
    std::string failed_stage;
    int level = -1;
    std::string detail;
    nlohmann::json counters = nlohmann::json::object();
};

inline nlohmann::json diagnostic_to_json(const Diagnostic& d) {
    return {{"failed_stage", d.failed_stage},
            {"level", d.level},
            {"detail", d.detail},
            {"counters", d.counters}};
}

enum class CheckLevel { DegreeOnly, DegreeDenseness };

// Partial embedding after `level` classes, plus one candidate set per
// still-unembedded target vertex. Candidate sets are bit masks over the
// host part holding that vertex's assigned cluster. The referenced view,
// target, and plan must outlive the state.
struct EmbeddingState {
    int level = 0;
    double p = 1.0;
    double alpha = 1.0 / 3.0;
    double floor_frac = 1.0;
    bool debug_identity = false;
    Color host_color = Color::Red;
    std::vector<double> eps_schedule;
    std::vector<VertexSet> clusters;
    std::vector<Bitset> cluster_masks;
    std::vector<std::optional<Vertex>> phi;
    std::vector<Bitset> candidates;
    std::uint64_t identity_checks = 0;
    const MultipartiteGraph* view = nullptr;
    const TargetGraph* h = nullptr;
    const PrepPlan* plan = nullptr;

    bool complete() const { return level >= static_cast<int>(plan->classes.size()); }
    bool embedded(int w) const { return phi[static_cast<std::size_t>(w)].has_value(); }
    int class_of(int w) const { return plan->g[static_cast<std::size_t>(w)]; }
    std::size_t class_cluster_size(int c) const {
        return clusters[static_cast<std::size_t>(c)].size();
    }
};

namespace embed_detail {

inline void and_row_into(Bitset& b, const std::uint64_t* row) {
    std::uint64_t* w = b.data();
    for (std::size_t k = 0; k < b.words(); ++k) w[k] &= row[k];
}

// floor_frac * (p/4)^ldeg[z][prefix] * |A_{g(z)}| — the size a candidate
// set is expected to keep after `prefix` classes are placed.
inline double size_floor(const EmbeddingState& s, int z, int prefix, double frac) {
    double m = static_cast<double>(s.class_cluster_size(s.class_of(z)));
    int k = s.plan->ldeg[static_cast<std::size_t>(z)][static_cast<std::size_t>(prefix)];
    return frac * std::pow(s.p / 4.0, k) * m;
}

}  // namespace embed_detail

inline EmbeddingState init_state(const MultipartiteGraph& view,
                                 const std::vector<VertexSet>& clusters, const TargetGraph& h,
                                 const PrepPlan& plan, const ConstantSchedule& schedule, double p,
                                 Color host_color, bool debug_identity = false) {
    const int K = plan.class_count();
    if (K > static_cast<int>(clusters.size()))
        throw std::invalid_argument("more target classes than supplied clusters");
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p outside (0,1]");
    if (h.n != plan.n) throw std::invalid_argument("plan built for a different target");

    EmbeddingState s;
    s.p = p;
    s.alpha = rat_value(schedule.alpha);
    s.floor_frac = schedule.floor_frac;
    s.debug_identity = debug_identity;
    s.host_color = host_color;
    s.view = &view;
    s.h = &h;
    s.plan = &plan;
    for (const auto& q : schedule.eps_chain) s.eps_schedule.push_back(rat_value(q));
    while (static_cast<int>(s.eps_schedule.size()) < K + 1)
        s.eps_schedule.push_back(s.eps_schedule.empty() ? 1.0 : s.eps_schedule.back());

    const std::size_t N = view.N();
    for (int c = 0; c < K; ++c) {
        const auto& cl = clusters[static_cast<std::size_t>(c)];
        if (cl.part < 0 || cl.part >= view.r())
            throw std::invalid_argument("cluster part out of range");
        if (cl.members.empty()) throw std::invalid_argument("empty cluster");
        s.clusters.push_back(cl);
        s.cluster_masks.push_back(make_mask(N, cl.members));
    }
    for (int c1 = 0; c1 < K; ++c1)
        for (int c2 = c1 + 1; c2 < K; ++c2)
            if (s.clusters[static_cast<std::size_t>(c1)].part ==
                    s.clusters[static_cast<std::size_t>(c2)].part &&
                and_count(s.cluster_masks[static_cast<std::size_t>(c1)],
                          s.cluster_masks[static_cast<std::size_t>(c2)]) > 0)
                throw std::invalid_argument("overlapping clusters in one part");

    s.phi.assign(static_cast<std::size_t>(plan.n), std::nullopt);
    s.candidates.reserve(static_cast<std::size_t>(plan.n));
    for (int w = 0; w < plan.n; ++w)
        s.candidates.push_back(s.cluster_masks[static_cast<std::size_t>(s.class_of(w))]);
    return s;
}

struct GoodSet {
    Bitset set;
    int kept = 0;
    int dropped_degree = 0;
    int dropped_denseness = 0;
};

// Claim-1 filter: keep v in C(y) whose neighborhood into every
// right-neighbor's candidate set clears the size floor at the next
// prefix; optionally also re-check denseness of the updated pairs.
inline GoodSet good_set(const EmbeddingState& s, int y,
                        CheckLevel check = CheckLevel::DegreeOnly,
                        const CheckMode& dense_mode = CheckMode::Sampled(32, 0)) {
    const int c = s.level;
    if (s.class_of(y) != c || s.embedded(y))
        throw std::invalid_argument("vertex not in the class being embedded");
    const auto& plan = *s.plan;

    std::vector<int> right;
    for (int z : s.h->adj[static_cast<std::size_t>(y)])
        if (plan.g[static_cast<std::size_t>(z)] > c) right.push_back(z);

    GoodSet out;
    out.set = Bitset(s.view->N());
    if (right.empty()) {
        out.set = s.candidates[static_cast<std::size_t>(y)];
        out.kept = static_cast<int>(out.set.count());
        return out;
    }

    std::vector<double> floors;
    for (int z : right)
        floors.push_back(embed_detail::size_floor(s, z, c + 1, s.floor_frac));

    std::vector<std::pair<int, int>> dense_edges;
    if (check == CheckLevel::DegreeDenseness) {
        std::set<std::pair<int, int>> seen;
        for (int z : right)
            for (int z2 : s.h->adj[static_cast<std::size_t>(z)])
                if (plan.g[static_cast<std::size_t>(z2)] > c) {
                    auto key = std::minmax(z, z2);
                    if (seen.insert(key).second) dense_edges.push_back(key);
                }
    }

    const int part_y = s.clusters[static_cast<std::size_t>(c)].part;
    const auto& cy = s.candidates[static_cast<std::size_t>(y)];
    std::uint64_t probe = 0;
    cy.for_each([&](std::size_t vi) {
        Vertex v{part_y, static_cast<int>(vi)};
        for (std::size_t i = 0; i < right.size(); ++i) {
            int z = right[i];
            int part_z = s.clusters[static_cast<std::size_t>(s.class_of(z))].part;
            auto cnt = and_count_raw(s.view->neighbor_row(v, part_z),
                                     s.candidates[static_cast<std::size_t>(z)]);
            if (static_cast<double>(cnt) < floors[i] - 1e-9) {
                ++out.dropped_degree;
                return;
            }
        }
        if (check == CheckLevel::DegreeDenseness && !dense_edges.empty()) {
            double eps_next = s.eps_schedule[std::min<std::size_t>(
                static_cast<std::size_t>(c) + 1, s.eps_schedule.size() - 1)];
            auto updated_set = [&](int z) {
                Bitset b = s.candidates[static_cast<std::size_t>(z)];
                bool is_right = std::find(right.begin(), right.end(), z) != right.end();
                if (is_right) {
                    int part_z = s.clusters[static_cast<std::size_t>(s.class_of(z))].part;
                    embed_detail::and_row_into(b, s.view->neighbor_row(v, part_z));
                }
                return VertexSet{s.clusters[static_cast<std::size_t>(s.class_of(z))].part,
                                 b.to_indices()};
            };
            for (auto [z, z2] : dense_edges) {
                auto xs = updated_set(z);
                auto ys = updated_set(z2);
                if (xs.members.empty() || ys.members.empty()) {
                    ++out.dropped_denseness;
                    return;
                }
                CheckMode mode = dense_mode;
                if (!mode.exact) mode.seed = mix_seed(dense_mode.seed, ++probe, vi);
                auto cert = check_dense_pair(*s.view, xs, ys, s.p, s.alpha, eps_next, mode);
                if (cert.verdict == Verdict::Violated) {
                    ++out.dropped_denseness;
                    return;
                }
            }
        }
        out.set.set(vi);
        ++out.kept;
    });
    return out;
}

struct MatchOutcome {
    bool ok = false;
    std::vector<int> assignment;
    std::vector<int> witness;
    std::size_t witness_union = 0;
};

// Augmenting-path matching of positions into their bit sets,
// most-constrained position first, hosts in ascending index. On failure
// the witness is the alternating-reachable set from the unmatched
// positions, which pins |Y| > |union of sets over Y|.
inline MatchOutcome match_distinct(const std::vector<Bitset>& sets) {
    const int n = static_cast<int>(sets.size());
    MatchOutcome out;
    out.assignment.assign(static_cast<std::size_t>(n), -1);
    if (n == 0) {
        out.ok = true;
        return out;
    }
    const std::size_t width = sets[0].size();
    for (const auto& b : sets)
        if (b.size() != width) throw std::invalid_argument("candidate sets of unequal width");

    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return sets[static_cast<std::size_t>(a)].count() < sets[static_cast<std::size_t>(b)].count();
    });

    std::vector<int> owner(width, -1);
    std::vector<char> used(width, 0);
    auto augment = [&](auto&& self, int u) -> bool {
        const auto& su = sets[static_cast<std::size_t>(u)];
        for (std::size_t v = su.find_next(0); v < width; v = su.find_next(v + 1)) {
            if (used[v]) continue;
            used[v] = 1;
            if (owner[v] < 0 || self(self, owner[v])) {
                owner[v] = u;
                out.assignment[static_cast<std::size_t>(u)] = static_cast<int>(v);
                return true;
            }
        }
        return false;
    };

    int matched = 0;
    for (int u : order) {
        std::fill(used.begin(), used.end(), 0);
        if (augment(augment, u)) ++matched;
    }
    if (matched == n) {
        out.ok = true;
        return out;
    }

    // König-side deficiency witness.
    std::vector<char> in_z(static_cast<std::size_t>(n), 0);
    std::vector<char> reach(width, 0);
    std::vector<int> stack;
    for (int u = 0; u < n; ++u)
        if (out.assignment[static_cast<std::size_t>(u)] < 0) {
            in_z[static_cast<std::size_t>(u)] = 1;
            stack.push_back(u);
        }
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        const auto& su = sets[static_cast<std::size_t>(u)];
        for (std::size_t v = su.find_next(0); v < width; v = su.find_next(v + 1)) {
            if (reach[v]) continue;
            reach[v] = 1;
            int w = owner[v];
            if (w >= 0 && !in_z[static_cast<std::size_t>(w)]) {
                in_z[static_cast<std::size_t>(w)] = 1;
                stack.push_back(w);
            }
        }
    }
    for (int u = 0; u < n; ++u)
        if (in_z[static_cast<std::size_t>(u)]) out.witness.push_back(u);
    for (std::size_t v = 0; v < width; ++v) out.witness_union += reach[v] ? 1 : 0;
    return out;
}

struct HallResult {
    std::map<int, int> psi;
    std::optional<Diagnostic> diagnostic;
    bool ok() const { return !diagnostic.has_value(); }
};

// Claim-2 placement of the current class into its good sets, or a
// diagnostic carrying the Hall-violating set. A violator whose good set
// was emptied by the denseness filter is reported as a denseness failure.
inline HallResult hall_match(const EmbeddingState& s, const std::vector<GoodSet>& goods) {
    const auto& members = s.plan->classes[static_cast<std::size_t>(s.level)];
    if (goods.size() != members.size())
        throw std::invalid_argument("one good set per class member required");

    std::vector<Bitset> sets;
    sets.reserve(goods.size());
    for (const auto& gset : goods) sets.push_back(gset.set);
    auto m = match_distinct(sets);

    HallResult res;
    if (m.ok) {
        for (std::size_t i = 0; i < members.size(); ++i)
            res.psi[members[i]] = m.assignment[i];
        return res;
    }

    bool denseness = false;
    nlohmann::json wit = nlohmann::json::array();
    nlohmann::json good_sizes = nlohmann::json::array();
    nlohmann::json cand_sizes = nlohmann::json::array();
    for (int i : m.witness) {
        auto idx = static_cast<std::size_t>(i);
        wit.push_back(members[idx]);
        good_sizes.push_back(goods[idx].kept);
        cand_sizes.push_back(s.candidates[static_cast<std::size_t>(members[idx])].count());
        if (goods[idx].kept == 0 && goods[idx].dropped_denseness > 0) denseness = true;
    }
    Diagnostic d;
    d.failed_stage = denseness ? stage_denseness : stage_hall;
    d.level = s.level;
    d.detail = "no perfect matching of the class into its good sets: " +
               std::to_string(m.witness.size()) + " vertices share " +
               std::to_string(m.witness_union) + " hosts";
    d.counters = {{"witness", wit},
                  {"union_size", m.witness_union},
                  {"good_sizes", good_sizes},
                  {"candidate_sizes", cand_sizes}};
    res.diagnostic = std::move(d);
    return res;
}

// Recompute every unembedded candidate set from the defining identity:
// the cluster cut down by the host neighborhoods of all embedded
// target-neighbors.
inline std::vector<std::optional<Bitset>> recompute_candidates(const EmbeddingState& s) {
    std::vector<std::optional<Bitset>> out(static_cast<std::size_t>(s.plan->n));
    for (int z = 0; z < s.plan->n; ++z) {
        if (s.embedded(z)) continue;
        int part_z = s.clusters[static_cast<std::size_t>(s.class_of(z))].part;
        Bitset b = s.cluster_masks[static_cast<std::size_t>(s.class_of(z))];
        for (int x : s.h->adj[static_cast<std::size_t>(z)])
            if (s.embedded(x))
                embed_detail::and_row_into(
                    b, s.view->neighbor_row(*s.phi[static_cast<std::size_t>(x)], part_z));
        out[static_cast<std::size_t>(z)] = std::move(b);
    }
    return out;
}

// Extend the embedding by the matched class and narrow the candidate sets
// of later vertices with exactly one neighbor in it. Everything the
// construction promises is re-asserted; a failure here is a bug trap, not
// a run outcome.
inline EmbeddingState advance_level(const EmbeddingState& s, const std::map<int, int>& psi) {
    const int c = s.level;
    const auto& members = s.plan->classes[static_cast<std::size_t>(c)];
    if (psi.size() != members.size())
        throw std::logic_error("placement does not cover the class");

    EmbeddingState t = s;
    const int part_c = s.clusters.empty() ? 0 : s.clusters[static_cast<std::size_t>(c)].part;
    std::set<int> taken;
    for (int y : members) {
        auto it = psi.find(y);
        if (it == psi.end()) throw std::logic_error("placement misses a class member");
        int idx = it->second;
        if (!s.candidates[static_cast<std::size_t>(y)].test(static_cast<std::size_t>(idx)))
            throw std::logic_error("placement outside the candidate set");
        if (!taken.insert(idx).second) throw std::logic_error("placement not injective");
        t.phi[static_cast<std::size_t>(y)] = Vertex{part_c, idx};
    }
    t.level = c + 1;

    for (int z = 0; z < s.plan->n; ++z) {
        if (t.embedded(z)) continue;
        int hits = 0, who = -1;
        for (int x : s.h->adj[static_cast<std::size_t>(z)])
            if (s.plan->g[static_cast<std::size_t>(x)] == c) {
                ++hits;
                who = x;
            }
        if (hits > 1) throw std::logic_error("two class members adjacent to one later vertex");
        if (hits == 1) {
            int part_z = s.clusters[static_cast<std::size_t>(s.class_of(z))].part;
            embed_detail::and_row_into(
                t.candidates[static_cast<std::size_t>(z)],
                s.view->neighbor_row(*t.phi[static_cast<std::size_t>(who)], part_z));
        }
    }

    // Partial map stays a monochromatic homomorphism.
    for (auto [u, w] : s.h->edges())
        if (t.embedded(u) && t.embedded(w) &&
            !t.view->has_edge(*t.phi[static_cast<std::size_t>(u)],
                              *t.phi[static_cast<std::size_t>(w)]))
            throw std::logic_error("embedded target edge missing from the host view");

    if (t.debug_identity) {
        auto fresh = recompute_candidates(t);
        for (int z = 0; z < t.plan->n; ++z)
            if (fresh[static_cast<std::size_t>(z)]) {
                ++t.identity_checks;
                if (!(*fresh[static_cast<std::size_t>(z)] ==
                      t.candidates[static_cast<std::size_t>(z)]))
                    throw std::logic_error("incremental candidate set diverged from identity");
            }
    }
    return t;
}

inline bool verify_embedding(const MultipartiteGraph& g, const EdgeColoring& col,
                             const TargetGraph& h, const PrepPlan& plan,
                             const std::vector<VertexSet>& clusters,
                             const std::vector<std::optional<Vertex>>& phi, Color color,
                             std::vector<std::string>* violations = nullptr) {
    auto fail = [&](const std::string& msg) {
        if (violations) violations->push_back(msg);
        return false;
    };
    bool ok = true;
    std::set<Vertex> seen;
    for (int w = 0; w < h.n; ++w) {
        if (!phi[static_cast<std::size_t>(w)]) {
            ok = fail("vertex " + std::to_string(w) + " unmapped");
            continue;
        }
        Vertex v = *phi[static_cast<std::size_t>(w)];
        if (!seen.insert(v).second)
            ok = fail("vertex " + std::to_string(w) + " shares a host vertex");
        int c = plan.g[static_cast<std::size_t>(w)];
        if (c < 0 || c >= static_cast<int>(clusters.size())) {
            ok = fail("vertex " + std::to_string(w) + " has no cluster");
            continue;
        }
        const auto& cl = clusters[static_cast<std::size_t>(c)];
        bool inside = v.part == cl.part &&
                      std::find(cl.members.begin(), cl.members.end(), v.index) != cl.members.end();
        if (!inside) ok = fail("vertex " + std::to_string(w) + " mapped outside its cluster");
    }
    for (auto [u, w] : h.edges()) {
        if (!phi[static_cast<std::size_t>(u)] || !phi[static_cast<std::size_t>(w)]) continue;
        Vertex a = *phi[static_cast<std::size_t>(u)], b = *phi[static_cast<std::size_t>(w)];
        if (!g.has_edge(a, b)) {
            ok = fail("target edge {" + std::to_string(u) + "," + std::to_string(w) +
                      "} maps to a non-edge");
            continue;
        }
        if (col.color_of(g, a, b) != color)
            ok = fail("target edge {" + std::to_string(u) + "," + std::to_string(w) +
                      "} maps to the wrong color");
    }
    return ok;
}

struct PerLevel {
    int class_size = 0;
    long long min_candidate = 0;
    double matching_time = 0.0;
};

struct EmbedOptions {
    CheckLevel check_level = CheckLevel::DegreeOnly;
    std::uint64_t dense_samples = 32;
    bool debug_identity = false;
    bool theoretical_floors = false;
    std::uint64_t audit = 64;
    std::uint64_t clique_budget = 1u << 20;
    int max_transversals = 2000;
    std::uint64_t seed = 0;
};

struct EmbedResult {
    bool success = false;
    bool color_known = false;
    Color color = Color::Red;
    std::vector<std::optional<Vertex>> phi;
    int levels = 0;
    std::vector<PerLevel> per_level;
    std::optional<Diagnostic> diagnostic;

    // run counters outside the serialized contract
    int transversals_tried = 0;
    int selections_certified = 0;
    std::uint64_t identity_checks = 0;
    double floor_margin_min = std::numeric_limits<double>::infinity();
    bool partition_certified = false;
    std::size_t cluster_size = 0;
};

inline nlohmann::json embed_result_to_json(const EmbedResult& r) {
    nlohmann::json j;
    j["success"] = r.success;
    if (r.color_known)
        j["color"] = r.color == Color::Red ? "red" : "blue";
    else
        j["color"] = nullptr;
    nlohmann::json phi = nlohmann::json::array();
    for (std::size_t w = 0; w < r.phi.size(); ++w)
        if (r.phi[w]) phi.push_back({static_cast<int>(w), r.phi[w]->part, r.phi[w]->index});
    j["phi"] = phi;
    j["levels"] = r.levels;
    nlohmann::json pl = nlohmann::json::array();
    for (const auto& lv : r.per_level)
        pl.push_back({{"class_size", lv.class_size},
                      {"min_candidate", lv.min_candidate},
                      {"matching_time", lv.matching_time}});
    j["per_level"] = pl;
    if (r.diagnostic) j["diagnostic"] = diagnostic_to_json(*r.diagnostic);
    return j;
}

namespace embed_detail {

struct Attempt {
    bool ok = false;
    Diagnostic diag;
    std::vector<PerLevel> per_level;
    int levels_done = 0;
    std::vector<std::optional<Vertex>> phi;
    std::uint64_t identity_checks = 0;
    double floor_margin = std::numeric_limits<double>::infinity();
};

inline Attempt run_levels(EmbeddingState state, const EmbedOptions& opt) {
    Attempt out;
    const auto& plan = *state.plan;
    const int K = plan.class_count();
    while (state.level < K) {
        const auto& members = plan.classes[static_cast<std::size_t>(state.level)];
        PerLevel pl;
        pl.class_size = static_cast<int>(members.size());
        auto t_start = std::chrono::steady_clock::now();

        std::vector<GoodSet> goods;
        goods.reserve(members.size());
        long long minc = std::numeric_limits<long long>::max();
        for (int y : members) {
            goods.push_back(good_set(
                state, y, opt.check_level,
                CheckMode::Sampled(opt.dense_samples,
                                   mix_seed(opt.seed, 21, static_cast<std::uint64_t>(state.level),
                                            static_cast<std::uint64_t>(y)))));
            minc = std::min(minc, static_cast<long long>(goods.back().kept));
        }
        pl.min_candidate = members.empty() ? 0 : minc;

        auto hall = hall_match(state, goods);
        pl.matching_time =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        out.per_level.push_back(pl);
        if (!hall.ok()) {
            out.diag = *hall.diagnostic;
            return out;
        }
        state = advance_level(state, hall.psi);
        out.levels_done = state.level;

        for (int z = 0; z < plan.n; ++z) {
            if (state.embedded(z)) continue;
            double base = size_floor(state, z, state.level, 1.0);
            double have = static_cast<double>(state.candidates[static_cast<std::size_t>(z)].count());
            if (base > 0.0) out.floor_margin = std::min(out.floor_margin, have / base);
            if (opt.theoretical_floors && have < base - 1e-9) {
                out.diag.failed_stage = stage_size_floor;
                out.diag.level = state.level;
                out.diag.detail = "candidate set below the full-strength size floor";
                out.diag.counters = {{"vertex", z}, {"size", have}, {"floor", base}};
                return out;
            }
        }
    }
    out.ok = true;
    out.phi = state.phi;
    out.identity_checks = state.identity_checks;
    return out;
}

inline bool deeper(const Diagnostic& a, const Diagnostic& b) {
    auto rank = [](const std::string& s) {
        if (s == stage_clique_selection) return 0;
        if (s == stage_size_floor) return 1;
        return 2;
    };
    if (a.level != b.level) return a.level > b.level;
    return rank(a.failed_stage) > rank(b.failed_stage);
}

}  // namespace embed_detail

// Full pipeline: partition the red view, reduce, walk the transversal
// cliques of the reduced graph, and for each one try to select a
// monochromatic dense clique and run the level-by-level embedding in its
// view. First verified success wins; otherwise the deepest failure is
// reported.
inline EmbedResult embed(const MultipartiteGraph& g, const EdgeColoring& col,
                         const TargetGraph& h, const ConstantSchedule& schedule, double p,
                         const EmbedOptions& opt = {}) {
    EmbedResult res;
    auto plan = prepare_target(h);
    const int K = plan.class_count();
    res.phi.assign(static_cast<std::size_t>(h.n), std::nullopt);
    if (h.n == 0) {
        res.success = true;
        return res;
    }
    if (K > g.r()) {
        res.diagnostic = Diagnostic{stage_clique_selection, -1,
                                    "target needs more classes than the host has parts",
                                    {{"classes", K}, {"parts", g.r()}}};
        return res;
    }
    if (!(p > 0.0)) {
        res.diagnostic = Diagnostic{stage_clique_selection, -1,
                                    "pipeline needs a positive edge probability",
                                    {{"p", p}}};
        return res;
    }

    auto red = monochrome_view(g, col, Color::Red);
    double eps_refine = rat_value(schedule.eps);
    auto P = refine_partition(red, p, eps_refine, schedule.t0, schedule.T0, opt.audit,
                              mix_seed(opt.seed, 11));
    res.partition_certified = P.certified;
    res.cluster_size = P.cluster_size();

    for (int c = 0; c < K; ++c)
        if (plan.classes[static_cast<std::size_t>(c)].size() > P.cluster_size()) {
            res.diagnostic =
                Diagnostic{stage_size_floor, c, "target class larger than a host cluster",
                           {{"class", c},
                            {"class_size", plan.classes[static_cast<std::size_t>(c)].size()},
                            {"cluster_size", P.cluster_size()}}};
            return res;
        }

    auto F = reduced_graph(red, P, p, eps_refine, opt.audit, mix_seed(opt.seed, 12));

    std::optional<MultipartiteGraph> blue;
    auto view_of = [&](Color c) -> const MultipartiteGraph& {
        if (c == Color::Red) return red;
        if (!blue) blue = monochrome_view(g, col, Color::Blue);
        return *blue;
    };

    std::optional<Diagnostic> best;
    std::vector<PerLevel> best_per_level;
    double best_margin = std::numeric_limits<double>::infinity();
    std::optional<std::string> selection_note;
    auto note_failure = [&](embed_detail::Attempt&& a) {
        if (!best || embed_detail::deeper(a.diag, *best)) {
            best = std::move(a.diag);
            best_per_level = std::move(a.per_level);
            best_margin = a.floor_margin;
        }
    };

    auto search = for_each_regular_clique(
        F, g.r(), opt.clique_budget, [&](const std::vector<ReducedNode>& kr) {
            if (res.transversals_tried >= opt.max_transversals) return true;
            ++res.transversals_tried;
            auto sel = select_dense_mono_clique(
                g, col, P, kr, p, rat_value(schedule.eps0), K, opt.audit,
                mix_seed(opt.seed, 13, static_cast<std::uint64_t>(res.transversals_tried)));
            if (!sel.selection) {
                selection_note = sel.note;
                return false;
            }
            ++res.selections_certified;
            const auto& chosen = *sel.selection;
            const auto& view = view_of(chosen.color);
            auto state = init_state(view, chosen.clusters, h, plan, schedule, p, chosen.color,
                                    opt.debug_identity);
            auto attempt = embed_detail::run_levels(std::move(state), opt);
            res.identity_checks += attempt.identity_checks;
            if (!attempt.ok) {
                note_failure(std::move(attempt));
                return false;
            }
            res.success = true;
            res.color_known = true;
            res.color = chosen.color;
            res.phi = attempt.phi;
            res.levels = K;
            res.per_level = attempt.per_level;
            res.floor_margin_min = attempt.floor_margin;
            std::vector<std::string> bad;
            if (!verify_embedding(g, col, h, plan, chosen.clusters, res.phi, res.color, &bad))
                throw std::logic_error("embedding failed re-validation: " +
                                       (bad.empty() ? std::string("?") : bad.front()));
            return true;
        });

    if (res.success) return res;

    if (best) {
        res.levels = std::max(0, best->level);
        res.per_level = std::move(best_per_level);
        res.floor_margin_min = best_margin;
        res.diagnostic = std::move(*best);
    } else {
        Diagnostic d;
        d.failed_stage = stage_clique_selection;
        d.level = -1;
        d.detail = res.transversals_tried == 0
                       ? "no transversal clique of regular pairs found"
                       : "no transversal produced a certified monochromatic clique";
        if (selection_note && !selection_note->empty())
            d.detail += ": " + *selection_note;
        d.counters = {{"transversals", res.transversals_tried},
                      {"selections", res.selections_certified},
                      {"budget_exhausted", search.budget_exhausted},
                      {"partition_certified", res.partition_certified}};
        res.diagnostic = std::move(d);
    }
    res.diagnostic->counters["transversals"] = res.transversals_tried;
    res.diagnostic->counters["selections"] = res.selections_certified;
    return res;
}

}  // namespace monoembed
