#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "monoembed/graph.hpp"
#include "monoembed/rng.hpp"

namespace monoembed {

enum class Verdict { Holds, Violated, PreconditionNotMet };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Holds: return "holds";
        case Verdict::Violated: return "violated";
        case Verdict::PreconditionNotMet: return "precondition-not-met";
    }
    return "?";
}

struct CheckMode {
    bool exact = true;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    static CheckMode Exact() { return {true, 0, 0}; }
    static CheckMode Sampled(std::uint64_t samples, std::uint64_t seed) {
        return {false, samples, seed};
    }
};

struct PairWitness {
    std::vector<int> xsub, ysub;
    double density = 0.0;
    double deviation = 0.0;
};

// Outcome of a single pair check. For regularity checks max_deviation is
// the worst |d(X',Y') - d(X,Y)| seen; for denseness checks it is the worst
// shortfall (alpha - eps) - d(X',Y') (negative when the pair is dense with
// room to spare).
struct PairCertificate {
    Verdict verdict = Verdict::Holds;
    bool sampled = false;
    double max_deviation = 0.0;
    std::optional<PairWitness> witness;
    std::uint64_t samples_used = 0;
};

struct PropertyReport {
    std::string property;
    nlohmann::json params;
    Verdict verdict = Verdict::Holds;
    bool sampled = true;
    double max_deviation = 0.0;
    std::optional<nlohmann::json> witness;
    std::uint64_t samples_used = 0;
    std::uint64_t seed = 0;
};

inline nlohmann::json report_to_json(const PropertyReport& r) {
    nlohmann::json j;
    j["property"] = r.property;
    j["params"] = r.params;
    j["verdict"] = verdict_name(r.verdict);
    j["sampled"] = r.sampled;
    j["max_deviation"] = r.max_deviation;
    if (r.witness) j["witness"] = *r.witness;
    j["samples_used"] = r.samples_used;
    j["seed"] = r.seed;
    return j;
}

// Smallest admissible subset size: |X'| >= eps|X| (at least one vertex).
inline std::size_t threshold_size(double eps, std::size_t n) {
    double w = std::ceil(eps * static_cast<double>(n) - 1e-9);
    return static_cast<std::size_t>(std::max(1.0, w));
}

namespace prop_detail {

inline void validate_pair(const MultipartiteGraph& g, const VertexSet& x, const VertexSet& y,
                          double p, double eps) {
    if (x.part == y.part) throw std::invalid_argument("pair check needs distinct parts");
    if (x.members.empty() || y.members.empty())
        throw std::invalid_argument("pair check of an empty set");
    if (p <= 0.0) throw std::invalid_argument("pair check needs p > 0");
    if (eps <= 0.0 || eps > 1.0) throw std::invalid_argument("eps outside (0,1]");
    for (int a : x.members) g.check_vertex({x.part, a});
    for (int b : y.members) g.check_vertex({y.part, b});
}

// Number of k-subsets of an n-set, capped (returns cap+1 once exceeded).
inline double comb_capped(std::size_t n, std::size_t k, double cap) {
    if (k > n) return 0.0;
    double v = 1.0;
    for (std::size_t i = 1; i <= k; ++i) {
        v = v * static_cast<double>(n - k + i) / static_cast<double>(i);
        if (v > cap) return cap + 1.0;
    }
    return v;
}

// Visits subsets in combination order: f(selected index vector).
template <class F>
void for_each_combination(std::size_t n, std::size_t k, F&& f) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        f(idx);
        std::size_t pos = k;
        while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
        if (pos == 0) break;
        ++idx[pos - 1];
        for (std::size_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
    }
}

// Full enumeration over admissible subpairs (all sizes above threshold)
// using per-vertex incidence masks restricted to the pair.
template <class Visit>
void exact_pair_scan(const MultipartiteGraph& g, const VertexSet& x, const VertexSet& y,
                     double eps, Visit&& visit) {
    const std::size_t nx = x.members.size(), ny = y.members.size();
    if (nx + ny > 18)
        throw std::invalid_argument("exact pair check limited to |X|+|Y| <= 18");
    std::size_t wx = threshold_size(eps, nx), wy = threshold_size(eps, ny);
    std::vector<std::uint32_t> rb(nx, 0);
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j)
            if (g.has_edge({x.part, x.members[i]}, {y.part, y.members[j]}))
                rb[i] |= std::uint32_t{1} << j;
    std::vector<int> col(ny, 0);
    for (std::uint32_t mx = 1; mx < (std::uint32_t{1} << nx); ++mx) {
        auto sx = static_cast<std::size_t>(std::popcount(mx));
        if (sx < wx) continue;
        std::fill(col.begin(), col.end(), 0);
        for (std::size_t i = 0; i < nx; ++i)
            if (mx >> i & 1)
                for (std::size_t j = 0; j < ny; ++j) col[j] += rb[i] >> j & 1;
        for (std::uint32_t my = 1; my < (std::uint32_t{1} << ny); ++my) {
            auto sy = static_cast<std::size_t>(std::popcount(my));
            if (sy < wy) continue;
            std::uint64_t e = 0;
            for (std::size_t j = 0; j < ny; ++j)
                if (my >> j & 1) e += col[j];
            visit(mx, my, sx, sy, e);
        }
    }
}

inline std::vector<int> unpack(std::uint32_t mask, const std::vector<int>& members) {
    std::vector<int> out;
    for (std::size_t i = 0; i < members.size(); ++i)
        if (mask >> i & 1) out.push_back(members[i]);
    return out;
}

inline double edge_fraction(const MultipartiteGraph& g, int xpart, const std::vector<int>& xs,
                            int ypart, const Bitset& ymask, std::size_t ysize) {
    std::uint64_t e = 0;
    for (int a : xs) e += g.degree_into({xpart, a}, ypart, ymask);
    return static_cast<double>(e) /
           (static_cast<double>(xs.size()) * static_cast<double>(ysize));
}

// Threshold-size subpair scan for the sampled modes. When the sample
// budget covers every threshold-size subpair the scan is exhaustive (and,
// since the extremal deviation is always attained at threshold size, then
// exact); otherwise it draws random subpairs.
template <class Visit>
std::uint64_t sampled_pair_scan(const MultipartiteGraph& g, const VertexSet& x,
                                const VertexSet& y, double eps, std::uint64_t samples,
                                std::uint64_t seed, Visit&& visit) {
    const std::size_t nx = x.members.size(), ny = y.members.size();
    std::size_t wx = threshold_size(eps, nx), wy = threshold_size(eps, ny);
    double total = comb_capped(nx, wx, 1e18) * comb_capped(ny, wy, 1e18);
    std::uint64_t used = 0;
    if (total <= static_cast<double>(samples)) {
        for_each_combination(nx, wx, [&](const std::vector<std::size_t>& xi) {
            std::vector<int> xs;
            xs.reserve(wx);
            for (auto i : xi) xs.push_back(x.members[i]);
            for_each_combination(ny, wy, [&](const std::vector<std::size_t>& yi) {
                Bitset ymask(g.N());
                std::vector<int> ys;
                ys.reserve(wy);
                for (auto j : yi) {
                    ymask.set(static_cast<std::size_t>(y.members[j]));
                    ys.push_back(y.members[j]);
                }
                ++used;
                visit(xs, ys, edge_fraction(g, x.part, xs, y.part, ymask, wy));
            });
        });
        return used;
    }
    Rng rng(seed);
    for (std::uint64_t s = 0; s < samples; ++s) {
        auto xs_idx = rng.sample_indices(nx, wx);
        auto ys_idx = rng.sample_indices(ny, wy);
        std::vector<int> xs, ys;
        xs.reserve(wx);
        ys.reserve(wy);
        Bitset ymask(g.N());
        for (int i : xs_idx) xs.push_back(x.members[i]);
        for (int j : ys_idx) {
            ys.push_back(y.members[j]);
            ymask.set(static_cast<std::size_t>(y.members[j]));
        }
        ++used;
        visit(xs, ys, edge_fraction(g, x.part, xs, y.part, ymask, wy));
    }
    return used;
}

}  // namespace prop_detail

// (eps, p)-regularity: every admissible subpair's p-density stays within
// eps of the pair's own. Exact mode enumerates all admissible subpairs
// (budget |X|+|Y| <= 18); sampled mode checks threshold-size subpairs,
// where the extremal deviation lives.
inline PairCertificate check_regular_pair(const MultipartiteGraph& g, const VertexSet& x,
                                          const VertexSet& y, double p, double eps,
                                          const CheckMode& mode) {
    prop_detail::validate_pair(g, x, y, p, eps);
    double base = pair_density(g, x, y, p);
    PairCertificate cert;
    cert.sampled = !mode.exact;
    if (mode.exact) {
        prop_detail::exact_pair_scan(
            g, x, y, eps,
            [&](std::uint32_t mx, std::uint32_t my, std::size_t sx, std::size_t sy,
                std::uint64_t e) {
                ++cert.samples_used;
                double d = static_cast<double>(e) /
                           (p * static_cast<double>(sx) * static_cast<double>(sy));
                double dev = std::abs(d - base);
                if (dev > cert.max_deviation) {
                    cert.max_deviation = dev;
                    cert.witness = PairWitness{prop_detail::unpack(mx, x.members),
                                               prop_detail::unpack(my, y.members), d, dev};
                }
            });
    } else {
        cert.samples_used = prop_detail::sampled_pair_scan(
            g, x, y, eps, mode.samples, mode.seed,
            [&](const std::vector<int>& xs, const std::vector<int>& ys, double raw) {
                double d = raw / p;
                double dev = std::abs(d - base);
                if (dev > cert.max_deviation) {
                    cert.max_deviation = dev;
                    cert.witness = PairWitness{xs, ys, d, dev};
                }
            });
    }
    cert.verdict = cert.max_deviation > eps + 1e-12 ? Verdict::Violated : Verdict::Holds;
    if (cert.verdict == Verdict::Holds && !mode.exact) cert.witness.reset();
    return cert;
}

// (eps, alpha, p)-denseness: every admissible subpair has p-density at
// least alpha - eps. max_deviation reports the worst shortfall.
inline PairCertificate check_dense_pair(const MultipartiteGraph& g, const VertexSet& x,
                                        const VertexSet& y, double p, double alpha, double eps,
                                        const CheckMode& mode) {
    prop_detail::validate_pair(g, x, y, p, eps);
    if (alpha <= 0.0 || alpha > 1.0) throw std::invalid_argument("alpha outside (0,1]");
    double floor_v = alpha - eps;
    PairCertificate cert;
    cert.sampled = !mode.exact;
    double min_density = std::numeric_limits<double>::infinity();
    auto consider = [&](const std::vector<int>& xs, const std::vector<int>& ys, double d) {
        if (d < min_density) {
            min_density = d;
            cert.witness = PairWitness{xs, ys, d, floor_v - d};
        }
    };
    if (mode.exact) {
        prop_detail::exact_pair_scan(
            g, x, y, eps,
            [&](std::uint32_t mx, std::uint32_t my, std::size_t sx, std::size_t sy,
                std::uint64_t e) {
                ++cert.samples_used;
                double d = static_cast<double>(e) /
                           (p * static_cast<double>(sx) * static_cast<double>(sy));
                if (d < min_density) {
                    min_density = d;
                    cert.witness = PairWitness{prop_detail::unpack(mx, x.members),
                                               prop_detail::unpack(my, y.members), d,
                                               floor_v - d};
                }
            });
    } else {
        cert.samples_used = prop_detail::sampled_pair_scan(
            g, x, y, eps, mode.samples, mode.seed,
            [&](const std::vector<int>& xs, const std::vector<int>& ys, double raw) {
                consider(xs, ys, raw / p);
            });
    }
    cert.max_deviation = floor_v - min_density;
    cert.verdict = min_density < floor_v - 1e-12 ? Verdict::Violated : Verdict::Holds;
    if (cert.verdict == Verdict::Holds && !mode.exact) cert.witness.reset();
    return cert;
}

// Uniformity of a random host: subsets of size ceil(N/ln N) in distinct
// parts should have p-density within 1/ln N of 1.
inline PropertyReport check_uniformity(const MultipartiteGraph& g, double p,
                                       std::uint64_t samples, std::uint64_t seed) {
    if (g.N() < 3) throw std::invalid_argument("uniformity needs N >= 3");
    if (p <= 0.0) throw std::invalid_argument("uniformity needs p > 0");
    double ln = std::log(static_cast<double>(g.N()));
    auto s = static_cast<std::size_t>(std::ceil(static_cast<double>(g.N()) / ln - 1e-9));
    double bound = 1.0 / ln;

    PropertyReport rep;
    rep.property = "uniformity";
    rep.seed = seed;
    rep.params = {{"r", g.r()}, {"N", g.N()}, {"p", p}, {"subset_size", s},
                  {"bound", bound}, {"samples", samples}};
    Rng rng(seed);
    for (std::uint64_t t = 0; t < samples; ++t) {
        int i = static_cast<int>(rng.below(static_cast<std::size_t>(g.r())));
        int j = static_cast<int>(rng.below(static_cast<std::size_t>(g.r() - 1)));
        if (j >= i) ++j;
        auto xs = rng.sample_indices(static_cast<std::size_t>(g.N()), s);
        auto ys = rng.sample_indices(static_cast<std::size_t>(g.N()), s);
        Bitset ymask = make_mask(g.N(), ys);
        std::uint64_t e = 0;
        for (int a : xs) e += g.degree_into({i, a}, j, ymask);
        double d = static_cast<double>(e) /
                   (p * static_cast<double>(s) * static_cast<double>(s));
        double dev = std::abs(d - 1.0);
        ++rep.samples_used;
        if (dev > rep.max_deviation) {
            rep.max_deviation = dev;
            if (dev > bound)
                rep.witness = nlohmann::json{{"part_i", i}, {"part_j", j}, {"density", d},
                                             {"xsub", xs}, {"ysub", ys}};
        }
    }
    rep.verdict = rep.max_deviation > bound ? Verdict::Violated : Verdict::Holds;
    if (rep.verdict == Verdict::Holds) rep.witness.reset();
    return rep;
}

// Number of pairs (K, u) with u in U and K fully adjacent to u. The family
// must consist of equal-size sets, each with at most one vertex per part,
// pairwise disjoint, and disjoint from U's part.
inline std::uint64_t congestion_count(const MultipartiteGraph& g,
                                      const std::vector<std::vector<Vertex>>& family,
                                      const VertexSet& u) {
    if (u.part < 0 || u.part >= g.r()) throw std::invalid_argument("U part outside graph");
    for (int m : u.members) g.check_vertex({u.part, m});
    std::set<std::pair<int, int>> seen;
    std::size_t k = family.empty() ? 0 : family.front().size();
    for (const auto& K : family) {
        if (K.empty() || K.size() != k)
            throw std::invalid_argument("family sets must share one positive size");
        std::set<int> parts;
        for (const auto& v : K) {
            g.check_vertex(v);
            if (v.part == u.part)
                throw std::invalid_argument("family vertex inside U's part");
            if (!parts.insert(v.part).second)
                throw std::invalid_argument("family set repeats a part");
            if (!seen.insert({v.part, v.index}).second)
                throw std::invalid_argument("family sets are not disjoint");
        }
    }
    Bitset umask = make_mask(g.N(), u.members);
    std::uint64_t total = 0;
    for (const auto& K : family) {
        Bitset common = umask;
        for (const auto& v : K) {
            Bitset row(g.N());
            const std::uint64_t* rp = g.neighbor_row(v, u.part);
            std::copy(rp, rp + row.words(), row.data());
            common &= row;
        }
        total += common.count();
    }
    return total;
}

// Congestion property: for sampled source sections l in [k, r-1] under a
// random part relabeling, disjoint k-set families F (|F| <= xi*N) and
// target sets U (|U| <= |F|) in the next part satisfy
// e(F, U) < 6 p^k |U| |F|. The adversarial strategy greedily picks
// high-codegree sets and the most-covered targets.
inline PropertyReport check_congestion(const MultipartiteGraph& g, double p, int k, double xi,
                                       std::uint64_t samples, std::uint64_t seed,
                                       bool adversarial = false) {
    if (k < 1 || k > g.r() - 1) throw std::invalid_argument("congestion needs 1 <= k <= r-1");
    if (p <= 0.0 || xi <= 0.0) throw std::invalid_argument("congestion needs p, xi > 0");
    auto fmax = static_cast<std::size_t>(std::floor(xi * static_cast<double>(g.N()) + 1e-9));

    PropertyReport rep;
    rep.property = "congestion";
    rep.seed = seed;
    rep.params = {{"k", k}, {"xi", xi}, {"p", p}, {"f_max", fmax},
                  {"strategy", adversarial ? "greedy" : "uniform"}, {"samples", samples}};
    if (fmax == 0) {
        rep.params["vacuous"] = true;
        rep.verdict = Verdict::Holds;
        return rep;
    }

    Rng rng(seed);
    const auto N = static_cast<std::size_t>(g.N());
    for (std::uint64_t t = 0; t < samples; ++t) {
        int l = k + static_cast<int>(rng.below(static_cast<std::size_t>(g.r() - k)));
        std::vector<int> perm(g.r());
        std::iota(perm.begin(), perm.end(), 0);
        rng.shuffle(perm);
        std::vector<int> sources(perm.begin(), perm.begin() + l);
        int upart = perm[l];
        std::size_t f = 1 + rng.below(fmax);

        std::vector<std::vector<Vertex>> family;
        if (!adversarial) {
            std::vector<std::vector<int>> pool(sources.size());
            for (std::size_t i = 0; i < sources.size(); ++i) {
                pool[i].resize(N);
                std::iota(pool[i].begin(), pool[i].end(), 0);
                rng.shuffle(pool[i]);
            }
            for (std::size_t c = 0; c < f; ++c) {
                auto pick = rng.sample_indices(sources.size(), static_cast<std::size_t>(k));
                std::vector<Vertex> K;
                bool ok = true;
                for (int pi : pick) {
                    if (pool[pi].empty()) { ok = false; break; }
                    K.push_back({sources[pi], pool[pi].back()});
                    pool[pi].pop_back();
                }
                if (!ok) break;
                family.push_back(std::move(K));
            }
        } else {
            std::vector<std::pair<std::uint64_t, std::vector<Vertex>>> cand;
            for (std::size_t c = 0; c < 4 * f; ++c) {
                auto pick = rng.sample_indices(sources.size(), static_cast<std::size_t>(k));
                std::vector<Vertex> K;
                for (int pi : pick) K.push_back({sources[pi], static_cast<int>(rng.below(N))});
                Bitset common(g.N());
                for (std::size_t w = 0; w < common.words(); ++w) common.data()[w] = ~0ull;
                for (const auto& v : K) {
                    Bitset row(g.N());
                    const std::uint64_t* rp = g.neighbor_row(v, upart);
                    std::copy(rp, rp + row.words(), row.data());
                    common &= row;
                }
                cand.push_back({common.count(), std::move(K)});
            }
            std::stable_sort(cand.begin(), cand.end(),
                             [](const auto& a, const auto& b) { return a.first > b.first; });
            std::set<std::pair<int, int>> used;
            for (auto& [score, K] : cand) {
                if (family.size() == f) break;
                bool ok = true;
                std::set<int> parts;
                for (const auto& v : K)
                    if (used.count({v.part, v.index}) || !parts.insert(v.part).second) {
                        ok = false;
                        break;
                    }
                if (!ok) continue;
                for (const auto& v : K) used.insert({v.part, v.index});
                family.push_back(std::move(K));
            }
        }
        if (family.empty()) continue;

        std::size_t usize = 1 + rng.below(family.size());
        VertexSet u{upart, {}};
        if (!adversarial) {
            u.members = rng.sample_indices(N, usize);
        } else {
            std::vector<std::pair<std::uint64_t, int>> score(N);
            for (std::size_t v = 0; v < N; ++v) {
                std::uint64_t c = 0;
                for (const auto& K : family) {
                    bool all = true;
                    for (const auto& kv : K)
                        if (!g.has_edge(kv, {upart, static_cast<int>(v)})) { all = false; break; }
                    c += all;
                }
                score[v] = {c, static_cast<int>(v)};
            }
            std::stable_sort(score.begin(), score.end(), [](const auto& a, const auto& b) {
                return a.first > b.first || (a.first == b.first && a.second < b.second);
            });
            for (std::size_t i = 0; i < usize; ++i) u.members.push_back(score[i].second);
        }

        std::uint64_t e = congestion_count(g, family, u);
        double bound = 6.0 * std::pow(p, k) * static_cast<double>(usize) *
                       static_cast<double>(family.size());
        double ratio = static_cast<double>(e) / bound;
        ++rep.samples_used;
        if (ratio > rep.max_deviation) {
            rep.max_deviation = ratio;
            if (static_cast<double>(e) >= bound) {
                nlohmann::json fam = nlohmann::json::array();
                for (const auto& K : family) {
                    nlohmann::json ks = nlohmann::json::array();
                    for (const auto& v : K) ks.push_back({{"part", v.part}, {"index", v.index}});
                    fam.push_back(ks);
                }
                rep.witness = nlohmann::json{{"l", l}, {"u_part", upart}, {"family", fam},
                                             {"u", u.members}, {"count", e}, {"bound", bound}};
            }
        }
        if (static_cast<double>(e) >= bound) rep.verdict = Verdict::Violated;
    }
    if (rep.verdict != Verdict::Violated) rep.verdict = Verdict::Holds;
    return rep;
}

struct TripleOutcome {
    bool pre_one = false;   // (X,Y), (Y,Z) dense
    bool pre_two = false;   // additionally (X,Z) dense
    int bad_one = 0, bad_two = 0;
    double frac_one = 0.0, frac_two = 0.0;
    bool violated = false;
};

// Consequence of host denseness inheritance on a class triple: for all but
// a mu-fraction of x in X, the pair (N(x) cap Y, Z) and the pair
// (N(x) cap Y, N(x) cap Z) stay (eps', alpha, p)-dense. Vertices whose
// relevant neighborhood is empty count as bad.
inline TripleOutcome bad_triple_outcome(const MultipartiteGraph& g, const VertexSet& x,
                                        const VertexSet& y, const VertexSet& z, double p,
                                        double alpha, double eps, double eps_prime, double mu,
                                        const CheckMode& inner) {
    if (x.part == y.part || x.part == z.part || y.part == z.part)
        throw std::invalid_argument("triple needs three distinct parts");
    auto dense = [&](const VertexSet& a, const VertexSet& b, double e, std::uint64_t tag) {
        CheckMode m = inner;
        if (!m.exact) m.seed = mix_seed(inner.seed, tag);
        return check_dense_pair(g, a, b, p, alpha, e, m).verdict == Verdict::Holds;
    };
    TripleOutcome out;
    out.pre_one = dense(x, y, eps, 1) && dense(y, z, eps, 2);
    out.pre_two = out.pre_one && dense(x, z, eps, 3);
    if (!out.pre_one) return out;

    Bitset ymask = make_mask(g.N(), y.members);
    Bitset zmask = make_mask(g.N(), z.members);
    std::uint64_t tag = 10;
    for (int a : x.members) {
        Vertex vx{x.part, a};
        std::vector<int> ny, nz;
        for (int b : y.members)
            if (g.has_edge(vx, {y.part, b})) ny.push_back(b);
        for (int c : z.members)
            if (g.has_edge(vx, {z.part, c})) nz.push_back(c);
        VertexSet nys{y.part, ny}, nzs{z.part, nz};
        bool bad1 = ny.empty() || !dense(nys, z, eps_prime, tag++);
        out.bad_one += bad1;
        if (out.pre_two) {
            bool bad2 = ny.empty() || nz.empty() || !dense(nys, nzs, eps_prime, tag++);
            out.bad_two += bad2;
        }
    }
    auto nx = static_cast<double>(x.members.size());
    out.frac_one = out.bad_one / nx;
    out.frac_two = out.bad_two / nx;
    out.violated = (out.frac_one >= mu) || (out.pre_two && out.frac_two >= mu);
    return out;
}

// Samples class triples of the given size from distinct parts and tests
// the bad-vertex fractions against mu.
inline PropertyReport find_bad_triples(const MultipartiteGraph& g, double p, double alpha,
                                       double eps, double eps_prime, double mu,
                                       std::size_t class_size, std::uint64_t triples,
                                       std::uint64_t seed, const CheckMode& inner) {
    if (g.r() < 3) throw std::invalid_argument("bad-triple scan needs r >= 3");
    if (class_size < 1 || class_size > static_cast<std::size_t>(g.N()))
        throw std::invalid_argument("class size outside [1, N]");
    PropertyReport rep;
    rep.property = "bad-triples";
    rep.seed = seed;
    rep.params = {{"p", p}, {"alpha", alpha}, {"eps", eps}, {"eps_prime", eps_prime},
                  {"mu", mu}, {"class_size", class_size}, {"triples", triples}};
    Rng rng(seed);
    std::uint64_t evaluated = 0, misses = 0, violations = 0;
    const auto N = static_cast<std::size_t>(g.N());
    for (std::uint64_t t = 0; t < triples; ++t) {
        std::vector<int> parts(g.r());
        std::iota(parts.begin(), parts.end(), 0);
        rng.shuffle(parts);
        VertexSet x{parts[0], rng.sample_indices(N, class_size)};
        VertexSet y{parts[1], rng.sample_indices(N, class_size)};
        VertexSet z{parts[2], rng.sample_indices(N, class_size)};
        CheckMode in = inner;
        if (!in.exact) in.seed = mix_seed(seed, t);
        auto out = bad_triple_outcome(g, x, y, z, p, alpha, eps, eps_prime, mu, in);
        ++rep.samples_used;
        if (!out.pre_one) {
            ++misses;
            continue;
        }
        ++evaluated;
        double worst = std::max(out.frac_one, out.pre_two ? out.frac_two : 0.0);
        if (worst > rep.max_deviation) rep.max_deviation = worst;
        if (out.violated) {
            ++violations;
            if (!rep.witness)
                rep.witness = nlohmann::json{{"parts", {x.part, y.part, z.part}},
                                             {"frac_one", out.frac_one},
                                             {"frac_two", out.frac_two},
                                             {"xsub", x.members}};
        }
    }
    rep.params["counters"] = {{"evaluated", evaluated}, {"precondition_misses", misses},
                              {"violations", violations}};
    if (violations > 0) rep.verdict = Verdict::Violated;
    else if (evaluated == 0 && rep.samples_used > 0) rep.verdict = Verdict::PreconditionNotMet;
    else rep.verdict = Verdict::Holds;
    return rep;
}

// One-sided 95% Wilson interval upper limit for x successes in n trials.
inline double wilson_upper(double frac, double n) {
    if (n <= 0.0) return 1.0;
    const double z = 1.645;
    double z2 = z * z;
    double center = frac + z2 / (2.0 * n);
    double half = z * std::sqrt(frac * (1.0 - frac) / n + z2 / (4.0 * n * n));
    return (center + half) / (1.0 + z2 / n);
}

// Random subpairs of a dense pair stay dense at a relaxed eps'. The
// theoretical guarantee is a 1 - beta^{min(w1,w2)} fraction; the sampled
// fraction is accepted unless its Wilson upper bound falls short of that.
inline PropertyReport check_inherited_denseness(const MultipartiteGraph& g, const VertexSet& x,
                                                const VertexSet& y, double p, double alpha,
                                                double eps, double eps_prime, std::size_t w1,
                                                std::size_t w2, double beta,
                                                std::uint64_t samples, std::uint64_t seed,
                                                const CheckMode& inner) {
    prop_detail::validate_pair(g, x, y, p, eps);
    if (w1 < 1 || w1 > x.members.size() || w2 < 1 || w2 > y.members.size())
        throw std::invalid_argument("subset sizes outside the pair");
    if (beta < 0.0 || beta >= 1.0) throw std::invalid_argument("beta outside [0,1)");

    PropertyReport rep;
    rep.property = "inherited-denseness";
    rep.seed = seed;
    double wmin = static_cast<double>(std::min(w1, w2));
    double threshold = 1.0 - std::pow(beta, wmin);

    CheckMode pre = inner;
    if (!pre.exact) pre.seed = mix_seed(seed, 999);
    if (check_dense_pair(g, x, y, p, alpha, eps, pre).verdict != Verdict::Holds) {
        rep.verdict = Verdict::PreconditionNotMet;
        rep.params = {{"w1", w1}, {"w2", w2}, {"threshold", threshold}};
        return rep;
    }

    Rng rng(seed);
    std::uint64_t dense_count = 0;
    for (std::uint64_t t = 0; t < samples; ++t) {
        VertexSet xs{x.part, rng.sample_from(x.members, w1)};
        VertexSet ys{y.part, rng.sample_from(y.members, w2)};
        CheckMode in = inner;
        if (!in.exact) in.seed = mix_seed(seed, t);
        dense_count +=
            check_dense_pair(g, xs, ys, p, alpha, eps_prime, in).verdict == Verdict::Holds;
        ++rep.samples_used;
    }
    double frac = samples ? static_cast<double>(dense_count) / static_cast<double>(samples) : 1.0;
    double upper = wilson_upper(frac, static_cast<double>(samples));
    rep.params = {{"w1", w1}, {"w2", w2}, {"beta", beta}, {"threshold", threshold},
                  {"fraction", frac}, {"wilson_upper", upper}};
    rep.max_deviation = std::max(0.0, threshold - frac);
    rep.verdict = upper + 1e-12 >= threshold ? Verdict::Holds : Verdict::Violated;
    if (rep.verdict == Verdict::Violated)
        rep.witness = nlohmann::json{{"fraction", frac}, {"threshold", threshold}};
    return rep;
}

}  // namespace monoembed
