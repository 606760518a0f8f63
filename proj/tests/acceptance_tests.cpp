// Acceptance gate: one PASS/FAIL line per criterion, exit 0 only when
// every criterion passes.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <monoembed/constants.hpp>
#include <monoembed/embedder.hpp>
#include <monoembed/experiment.hpp>
#include <monoembed/graph.hpp>
#include <monoembed/hprep.hpp>
#include <monoembed/oracles.hpp>
#include <monoembed/properties.hpp>
#include <monoembed/target.hpp>

#include "support/distance_oracle.hpp"

using namespace monoembed;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// The frozen 50-seed battery, run once and shared by the gates below.
const ExperimentResult& battery_result() {
    static const ExperimentResult res = [] {
        std::ifstream in(std::string(MONOEMBED_CONFIG_DIR) + "/calibrated-battery.cfg");
        if (!in) throw std::runtime_error("cannot open calibrated battery config");
        return run_experiment(parse_experiment_config(in), 1);
    }();
    return res;
}

bool turan_exact(std::string& note) {
    const int cases[][2] = {{2, 1}, {2, 2}, {2, 3}, {3, 1}, {3, 2}, {4, 1}, {4, 2}};
    double worst = 0.0;
    for (auto [r, k] : cases) {
        auto t0 = std::chrono::steady_clock::now();
        auto res = turan_number(r, k);
        double dt = seconds_since(t0);
        worst = std::max(worst, dt);
        auto expect = static_cast<std::uint64_t>((r * (r - 1) / 2 - 1) * k * k);
        if (res.max_edges != expect) {
            note = "turan(" + std::to_string(r) + "," + std::to_string(k) + ") = " +
                   std::to_string(res.max_edges) + ", expected " + std::to_string(expect);
            return false;
        }
        if (dt >= 60.0) {
            note = "single case took " + std::to_string(dt) + "s";
            return false;
        }
    }
    note = "7 extremal values exact, slowest case " + std::to_string(worst) + "s";
    return true;
}

bool arrow_exact(std::string& note) {
    auto t0 = std::chrono::steady_clock::now();
    auto k6 = parse_target_spec("complete:6");
    auto k5 = parse_target_spec("complete:5");
    auto k3 = parse_target_spec("complete:3");
    auto p3 = parse_target_spec("path:3");
    bool a6 = arrow_check(k6, k3).arrows;
    bool a5 = arrow_check(k5, k3).arrows;
    bool a3 = arrow_check(k3, p3).arrows;
    auto rb = ramsey_bound(3);
    double dt = seconds_since(t0);
    if (!a6 || a5 || !a3) {
        note = "verdicts (K6,K3)/(K5,K3)/(K3,P3) = " + std::to_string(a6) + "/" +
               std::to_string(a5) + "/" + std::to_string(a3);
        return false;
    }
    if (!rb.exact || *rb.exact != 6) {
        note = "ramsey_bound(3) not exactly 6";
        return false;
    }
    if (dt >= 60.0) {
        note = "combined run took " + std::to_string(dt) + "s";
        return false;
    }
    note = "arrow verdicts match R(3)=6, combined " + std::to_string(dt) + "s";
    return true;
}

bool regularity_equiv(std::string& note) {
    int disagreements = 0;
    for (int i = 0; i < 500; ++i) {
        Rng rng(mix_seed(40000, i));
        int nx = 3 + static_cast<int>(rng.below(6));
        int ny = 3 + static_cast<int>(rng.below(6));
        double q = 0.2 + 0.7 * rng.unit();
        double eps = 0.15 + 0.45 * rng.unit();
        MultipartiteGraph g(2, 8);
        for (int a = 0; a < nx; ++a)
            for (int b = 0; b < ny; ++b)
                if (rng.coin(q)) g.add_edge({0, a}, {1, b});
        std::vector<int> xs(nx), ys(ny);
        std::iota(xs.begin(), xs.end(), 0);
        std::iota(ys.begin(), ys.end(), 0);
        VertexSet x{0, xs}, y{1, ys};

        auto exact = exact_regularity(g, x, y, q, eps);
        auto sampled = check_regular_pair(g, x, y, q, eps,
                                          CheckMode::Sampled(100000, mix_seed(41000, i)));
        if ((sampled.verdict == Verdict::Holds) != exact.regular) ++disagreements;
    }
    note = std::to_string(disagreements) + " disagreements in 500 pairs";
    return disagreements == 0;
}

bool congestion_equiv(std::string& note) {
    int disagreements = 0;
    for (int i = 0; i < 1000; ++i) {
        Rng rng(mix_seed(50000, i));
        int r = 2 + static_cast<int>(rng.below(3));
        int N = 4 + static_cast<int>(rng.below(27));
        int k = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(std::min(3, r - 1))));
        double q = rng.unit();
        auto g = generate_random(r, N, q, mix_seed(51000, i));

        int upart = static_cast<int>(rng.below(static_cast<std::size_t>(r)));
        std::vector<int> other_parts;
        for (int j = 0; j < r; ++j)
            if (j != upart) other_parts.push_back(j);

        std::vector<std::vector<int>> pool(static_cast<std::size_t>(r));
        for (int j : other_parts)
            pool[static_cast<std::size_t>(j)] = rng.sample_indices(static_cast<std::size_t>(N), static_cast<std::size_t>(N));

        auto cap = static_cast<std::size_t>(N) * other_parts.size() /
                   static_cast<std::size_t>(k);
        std::size_t fam = 1 + rng.below(std::min<std::size_t>(5, cap));
        std::vector<std::vector<Vertex>> family;
        for (std::size_t s = 0; s < fam; ++s) {
            auto parts = rng.sample_from(other_parts, static_cast<std::size_t>(k));
            std::vector<Vertex> K;
            bool ok = true;
            for (int j : parts) {
                auto& avail = pool[static_cast<std::size_t>(j)];
                if (avail.empty()) { ok = false; break; }
                K.push_back({j, avail.back()});
                avail.pop_back();
            }
            if (ok) family.push_back(std::move(K));
        }
        if (family.empty()) family.push_back({{other_parts[0], 0}});

        std::size_t usize = 1 + rng.below(static_cast<std::size_t>(N));
        VertexSet u{upart, rng.sample_indices(static_cast<std::size_t>(N), usize)};

        std::uint64_t naive = 0;
        for (const auto& K : family)
            for (int m : u.members) {
                bool all = true;
                for (const auto& v : K)
                    if (!g.has_edge(v, {upart, m})) { all = false; break; }
                naive += all;
            }
        if (congestion_count(g, family, u) != naive) ++disagreements;
    }
    note = std::to_string(disagreements) + " disagreements in 1000 instances";
    return disagreements == 0;
}

bool hprep_suite(std::string& note) {
    for (int i = 0; i < 100; ++i) {
        Rng rng(mix_seed(60000, i));
        int n = 5 + static_cast<int>(rng.below(46));
        int cap = 1 + static_cast<int>(rng.below(4));
        double frac = 0.2 + 0.5 * rng.unit();
        auto h = random_bounded_degree(n, cap, frac, mix_seed(61000, i));
        int delta = 0;
        for (int v = 0; v < h.n; ++v) delta = std::max(delta, h.degree(v));

        auto cube = cube_graph(h);
        if (!testsupport::same_graph(cube, testsupport::power_by_bfs(h, 3))) {
            note = "third power disagrees with BFS oracle at case " + std::to_string(i);
            return false;
        }

        auto plan = prepare_target(h);
        std::vector<std::string> violations;
        if (!verify_plan(h, plan, &violations)) {
            note = "plan verification failed at case " + std::to_string(i) + ": " +
                   (violations.empty() ? "?" : violations.front());
            return false;
        }

        int color_bound = delta * delta * delta - delta * delta + delta + 1;
        if (plan.colors_used > color_bound ||
            static_cast<int>(plan.class_count()) > plan.colors_used * (delta + 1)) {
            note = "class bound broken at case " + std::to_string(i) + ": " +
                   std::to_string(plan.class_count()) + " classes, " +
                   std::to_string(plan.colors_used) + " colors, delta " + std::to_string(delta);
            return false;
        }

        for (const auto& cls : plan.classes)
            for (std::size_t a = 0; a < cls.size(); ++a) {
                auto dist = testsupport::bfs_distances(h, cls[a]);
                for (std::size_t b = a + 1; b < cls.size(); ++b) {
                    int d = dist[static_cast<std::size_t>(cls[b])];
                    if (d > 0 && d < 4) {
                        note = "same-class distance " + std::to_string(d) + " at case " +
                               std::to_string(i);
                        return false;
                    }
                }
            }
    }
    note = "100 random targets: powers exact, plans verified, bounds hold";
    return true;
}

bool uniformity_stats(std::string& note) {
    auto t0 = std::chrono::steady_clock::now();
    int holds = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto g = generate_random(3, 3000, 0.2, seed);
        auto rep = check_uniformity(g, 0.2, 200, mix_seed(seed, 77));
        holds += rep.verdict == Verdict::Holds;
    }
    double dt = seconds_since(t0);
    note = std::to_string(holds) + "/20 runs hold in " + std::to_string(dt) + "s";
    return holds >= 19 && dt < 300.0;
}

bool identity_debug(std::string& note) {
    ScheduleOverrides ov;
    ov.t0 = 4;
    ov.T0 = 16;
    ov.eps0 = Rat(1, 2);
    ov.eps_star = Rat(1, 2);
    ov.floor_frac = 0.5;
    auto sched = practical_schedule(2, ov);
    auto h = parse_target_spec("cycle:40");

    std::uint64_t checks = 0;
    int successes = 0;
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        auto g = generate_random(5, 400, 0.35, seed);
        auto col = color_edges(g, ColoringStrategy::UniformRandom, mix_seed(seed, 1));
        EmbedOptions opt;
        opt.seed = seed;
        opt.debug_identity = true;
        try {
            auto res = embed(g, col, h, sched, 0.35, opt);
            checks += res.identity_checks;
            successes += res.success;
        } catch (const std::logic_error& e) {
            note = std::string("candidate identity mismatch: ") + e.what();
            return false;
        }
    }
    if (checks == 0) {
        note = "debug mode never exercised the identity recomputation";
        return false;
    }
    note = std::to_string(checks) + " identity checks, 0 mismatches, " +
           std::to_string(successes) + "/25 embeds succeeded";
    return true;
}

bool validity_gate(std::string& note) {
    const auto& res = battery_result();
    int successes = 0, errors = 0;
    for (const auto& row : res.rows) {
        successes += row.success;
        errors += row.stage == "error";
    }
    if (errors > 0) {
        note = std::to_string(errors) + " rows hit internal re-validation errors";
        return false;
    }
    if (successes == 0) {
        note = "battery produced no successes to verify";
        return false;
    }

    // Independent spot re-verification outside the embedder's own gate.
    auto h = parse_target_spec("cycle:40");
    ScheduleOverrides ov;
    ov.t0 = 4;
    ov.T0 = 16;
    ov.eps0 = Rat(1, 2);
    ov.eps_star = Rat(1, 2);
    ov.floor_frac = 0.5;
    auto sched = practical_schedule(2, ov);
    int rechecked = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto g = generate_random(5, 400, 0.35, seed);
        auto col = color_edges(g, ColoringStrategy::UniformRandom, mix_seed(seed, 1));
        EmbedOptions opt;
        opt.seed = seed;
        auto r = embed(g, col, h, sched, 0.35, opt);
        if (!r.success) continue;
        std::set<std::pair<int, int>> used;
        for (const auto& ph : r.phi) {
            if (!ph || !used.insert({ph->part, ph->index}).second) {
                note = "spot recheck: embedding not injective";
                return false;
            }
        }
        for (int a = 0; a < h.n; ++a)
            for (int b : h.adj[static_cast<std::size_t>(a)]) {
                if (b <= a) continue;
                if (!g.has_edge(*r.phi[static_cast<std::size_t>(a)],
                                *r.phi[static_cast<std::size_t>(b)]) ||
                    col.color_of(g, *r.phi[static_cast<std::size_t>(a)],
                                 *r.phi[static_cast<std::size_t>(b)]) != r.color) {
                    note = "spot recheck: a target edge is not monochromatic in the host";
                    return false;
                }
            }
        ++rechecked;
    }
    note = std::to_string(successes) + "/" + std::to_string(res.rows.size()) +
           " successes all verified, " + std::to_string(rechecked) + " spot-rechecked";
    return true;
}

bool calibrated_battery(std::string& note) {
    const auto& res = battery_result();
    int successes = 0;
    for (const auto& row : res.rows) successes += row.success;
    note = std::to_string(successes) + "/" + std::to_string(res.rows.size()) +
           " seeds succeeded (gate: 40)";
    return res.rows.size() == 50 && successes >= 40;
}

bool constants_exact(std::string& note) {
    for (int delta : {2, 3, 4})
        for (int T0 : {8, 64}) {
            auto s = theoretical_schedule(delta, T0);
            if (s.xi * s.B != Rat(1)) {
                note = "xi*B != 1 at delta=" + std::to_string(delta) +
                       ", T0=" + std::to_string(T0);
                return false;
            }
            long long pow4 = 1;
            for (int i = 0; i < delta - 1; ++i) pow4 *= 4;
            if (s.gamma * Rat(pow4 * T0) != Rat(1) - s.eps) {
                note = "gamma relation broken at delta=" + std::to_string(delta) +
                       ", T0=" + std::to_string(T0);
                return false;
            }
        }
    auto s = theoretical_schedule(2, 64);
    if (s.mu != Rat(1, 16) || s.eps_star != Rat(1, 12) || s.delta_bar != 18 ||
        s.xi != Rat(1, 24576)) {
        note = "theoretical_schedule(2, 64) fields off";
        return false;
    }
    note = "rational identities exact on all 6 (delta, T0) pairs";
    return true;
}

bool trivial_host_cli(std::string& note) {
    std::string dir = "/tmp/monoembed_acceptance";
    std::string mk = "mkdir -p " + dir;
    if (std::system(mk.c_str()) != 0) {
        note = "cannot create scratch directory";
        return false;
    }
    std::string host = dir + "/full.mpg";
    std::string bin = MONOEMBED_BIN;
    std::string gen = bin + " generate --r 5 --n 50 --p 1.0 --seed 1 --out " + host +
                      " >/dev/null 2>&1";
    if (std::system(gen.c_str()) != 0) {
        note = "host generation failed";
        return false;
    }
    int runs = 0, ok = 0;
    for (const std::string target : {"P10", "C12", "matching:3"})
        for (int seed = 1; seed <= 5; ++seed) {
            std::string cmd = bin + " embed --graph " + host +
                              " --color-strategy all-red --target " + target + " --p 1.0 --seed " +
                              std::to_string(seed) + " >/dev/null 2>&1";
            ++runs;
            int status = std::system(cmd.c_str());
            ok += WIFEXITED(status) && WEXITSTATUS(status) == 0;
        }
    note = std::to_string(ok) + "/" + std::to_string(runs) + " trivial-host embeds exit 0";
    return ok == runs;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<bool(std::string&)> fn;
    };
    const std::vector<Criterion> gates = {
        {"turan-exact", turan_exact},
        {"arrow-exact", arrow_exact},
        {"regularity-oracle-equivalence", regularity_equiv},
        {"congestion-oracle-equivalence", congestion_equiv},
        {"target-preparation-suite", hprep_suite},
        {"uniformity-statistics", uniformity_stats},
        {"candidate-identity-debug", identity_debug},
        {"embedding-validity-gate", validity_gate},
        {"calibrated-battery", calibrated_battery},
        {"constant-schedule-exactness", constants_exact},
        {"trivial-host-cli", trivial_host_cli},
    };

    int failed = 0;
    for (std::size_t i = 0; i < gates.size(); ++i) {
        auto t0 = std::chrono::steady_clock::now();
        std::string note;
        bool ok = false;
        try {
            ok = gates[i].fn(note);
        } catch (const std::exception& e) {
            note = std::string("exception: ") + e.what();
        }
        double dt = seconds_since(t0);
        std::printf("%s  %2zu  %-32s  %7.2fs  %s\n", ok ? "PASS" : "FAIL", i + 1,
                    gates[i].name, dt, note.c_str());
        std::fflush(stdout);
        failed += !ok;
    }
    if (failed) std::printf("%d of %zu criteria failed\n", failed, gates.size());
    else std::printf("all %zu criteria passed\n", gates.size());
    return failed == 0 ? 0 : 1;
}
