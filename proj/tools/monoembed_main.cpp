#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <monoembed/constants.hpp>
#include <monoembed/embedder.hpp>
#include <monoembed/experiment.hpp>
#include <monoembed/graph.hpp>
#include <monoembed/graph_io.hpp>
#include <monoembed/oracles.hpp>
#include <monoembed/properties.hpp>
#include <monoembed/target.hpp>

using namespace monoembed;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_diagnostic = 2;
constexpr int exit_infeasible = 3;

// "practical:<delta>" or a schedule JSON file.
ConstantSchedule schedule_from_spec(const std::string& spec,
                                    const ScheduleOverrides& ov = {}) {
    const std::string prefix = "practical:";
    bool has_override = ov.t0 || ov.T0 || ov.eps0 || ov.eps_star || ov.floor_frac ||
                        ov.delta_bar;
    if (spec.rfind(prefix, 0) == 0)
        return practical_schedule(std::stoi(spec.substr(prefix.size())), ov);
    if (has_override)
        throw std::invalid_argument("schedule overrides apply to practical:<delta> only");
    std::ifstream in(spec);
    if (!in) throw std::invalid_argument("cannot open schedule file: " + spec);
    nlohmann::json j;
    in >> j;
    return schedule_from_json(j);
}

// A target flag names either a spec ("cycle:40", "P10", sums with '+') or
// a target file on disk.
TargetGraph resolve_target(const std::string& spec) {
    if (std::filesystem::exists(spec)) {
        std::ifstream in(spec);
        return read_target(in);
    }
    return parse_target_spec(spec);
}

MultipartiteGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open graph file: " + path);
    return read_graph(in);
}

double estimate_p(const MultipartiteGraph& g) {
    double pairs = static_cast<double>(g.r()) * (g.r() - 1) / 2.0 *
                   static_cast<double>(g.N()) * static_cast<double>(g.N());
    return pairs == 0.0 ? 0.0 : static_cast<double>(g.edge_count()) / pairs;
}

struct GenerateArgs {
    int r = 0, n = 0;
    double p = -1.0, c = -1.0;
    int delta = 2;
    std::uint64_t seed = 1;
    std::string out;
};

int run_generate(const GenerateArgs& a) {
    double p = a.p;
    if (a.c >= 0.0) {
        auto ep = edge_probability(a.n, a.c, a.delta);
        p = ep.p;
        std::fprintf(stderr, "derived p = %.6g from C = %g, delta = %d%s\n", p, a.c, a.delta,
                     ep.clamped ? " (clamped)" : "");
    }
    auto g = generate_random(a.r, a.n, p, a.seed);
    std::ofstream out(a.out);
    if (!out) throw std::invalid_argument("cannot open output file: " + a.out);
    write_graph(out, g);
    std::fprintf(stderr, "generated r=%d N=%d p=%.6g seed=%llu edges=%llu -> %s\n", a.r, a.n, p,
                 static_cast<unsigned long long>(a.seed),
                 static_cast<unsigned long long>(g.edge_count()), a.out.c_str());
    return exit_ok;
}

struct AuditArgs {
    std::string graph;
    double p = 0.0;
    std::string schedule = "practical:2";
    std::uint64_t samples = 200;
    std::uint64_t triples = 10;
    int class_size = 0;
    double xi = -1.0;
    std::uint64_t seed = 1;
    bool adversarial = false;
};

int run_audit(const AuditArgs& a) {
    auto g = load_graph(a.graph);
    auto sched = schedule_from_spec(a.schedule);
    bool all_hold = true;
    auto emit = [&](const PropertyReport& rep) {
        std::cout << report_to_json(rep).dump() << "\n";
        if (rep.verdict != Verdict::Holds) all_hold = false;
    };

    emit(check_uniformity(g, a.p, a.samples, mix_seed(a.seed, 1)));

    double xi = a.xi > 0.0 ? a.xi : rat_value(sched.xi);
    for (int k = 1; k <= sched.delta && k <= g.r() - 1; ++k)
        emit(check_congestion(g, a.p, k, xi, a.samples, mix_seed(a.seed, 2, k), a.adversarial));

    if (g.r() >= 3) {
        int cs = a.class_size;
        if (cs <= 0)
            cs = static_cast<int>(
                std::ceil(static_cast<double>(g.N()) / std::log(static_cast<double>(g.N()))));
        // Inherited pairs are one chain step past the certified epsilon, so
        // the scan tests them at lambda times the chain cap.
        emit(find_bad_triples(g, a.p, rat_value(sched.alpha), rat_value(sched.eps_star),
                              rat_value(sched.eps_star * sched.lambda), rat_value(sched.mu),
                              static_cast<std::size_t>(cs), a.triples, mix_seed(a.seed, 3),
                              CheckMode::Sampled(64, mix_seed(a.seed, 4))));
    } else {
        std::fprintf(stderr, "bad-triple scan skipped: needs r >= 3\n");
    }
    return all_hold ? exit_ok : exit_diagnostic;
}

struct EmbedArgs {
    std::string graph;
    std::string coloring;
    std::string strategy;
    double p = -1.0;
    std::string target;
    std::string schedule = "practical:2";
    std::optional<int> t0, T0, delta_bar;
    std::optional<std::string> eps0, eps_star;
    std::optional<double> floor_frac;
    std::uint64_t seed = 1;
    std::string out;
    bool debug_identity = false;

    ScheduleOverrides overrides() const {
        ScheduleOverrides ov;
        ov.t0 = t0;
        ov.T0 = T0;
        ov.delta_bar = delta_bar;
        if (eps0) ov.eps0 = parse_rational(*eps0);
        if (eps_star) ov.eps_star = parse_rational(*eps_star);
        ov.floor_frac = floor_frac;
        return ov;
    }
};

int run_embed(const EmbedArgs& a) {
    auto g = load_graph(a.graph);
    EdgeColoring col(g.r(), g.N());
    if (!a.coloring.empty()) {
        std::ifstream in(a.coloring);
        if (!in) throw std::invalid_argument("cannot open coloring file: " + a.coloring);
        col = read_coloring(in, g);
    } else {
        col = color_edges(g, parse_strategy(a.strategy), mix_seed(a.seed, 1));
    }
    auto h = resolve_target(a.target);
    auto sched = schedule_from_spec(a.schedule, a.overrides());
    double p = a.p;
    if (p < 0.0) {
        p = estimate_p(g);
        std::fprintf(stderr, "estimated p = %.6g from edge density\n", p);
    }

    EmbedOptions opt;
    opt.seed = a.seed;
    opt.debug_identity = a.debug_identity;
    auto res = embed(g, col, h, sched, p, opt);

    if (res.success) {
        // Independent re-check of the embedding the JSON reports.
        for (std::size_t w = 0; w < res.phi.size(); ++w) {
            if (!res.phi[w]) throw std::logic_error("successful embedding left a vertex unplaced");
            for (std::size_t x = 0; x < w; ++x)
                if (res.phi[x]->part == res.phi[w]->part &&
                    res.phi[x]->index == res.phi[w]->index)
                    throw std::logic_error("successful embedding is not injective");
        }
        for (int u = 0; u < h.n; ++u)
            for (int v : h.adj[u]) {
                if (v <= u) continue;
                if (!g.has_edge(*res.phi[u], *res.phi[v]) ||
                    col.color_of(g, *res.phi[u], *res.phi[v]) != res.color)
                    throw std::logic_error("successful embedding misses a monochromatic edge");
            }
    }

    auto j = embed_result_to_json(res);
    if (!a.out.empty()) {
        std::ofstream out(a.out);
        if (!out) throw std::invalid_argument("cannot open output file: " + a.out);
        out << j.dump(2) << "\n";
    } else {
        std::cout << j.dump(2) << "\n";
    }
    if (res.success) {
        std::fprintf(stderr, "embedded %d vertices in %s after %d transversals\n", h.n,
                     res.color == Color::Red ? "red" : "blue", res.transversals_tried);
        return exit_ok;
    }
    std::fprintf(stderr, "embedding failed at stage %s: %s\n",
                 res.diagnostic->failed_stage.c_str(), res.diagnostic->detail.c_str());
    return exit_diagnostic;
}

struct ExperimentArgs {
    std::string config;
    std::string jsonl = "results.jsonl";
    std::string csv = "summary.csv";
    int threads = 1;
};

int run_experiment_cmd(const ExperimentArgs& a) {
    std::ifstream in(a.config);
    if (!in) throw std::invalid_argument("cannot open config file: " + a.config);
    auto cfg = parse_experiment_config(in);

    int threads = a.threads;
    if (const char* cap = std::getenv("MONOEMBED_THREADS")) {
        int limit = std::atoi(cap);
        if (limit >= 1) threads = std::min(threads, limit);
    }
    auto res = run_experiment(cfg, threads);

    std::ofstream jf(a.jsonl);
    if (!jf) throw std::invalid_argument("cannot open output file: " + a.jsonl);
    write_jsonl(jf, res);
    std::ofstream cf(a.csv);
    if (!cf) throw std::invalid_argument("cannot open output file: " + a.csv);
    write_summary_csv(cf, res);

    int successes = 0;
    for (const auto& row : res.rows) successes += row.success ? 1 : 0;
    std::fprintf(stderr, "ran %zu cells x %zu seeds: %d/%zu successes -> %s, %s\n",
                 res.cells.size(), res.seeds.size(), successes, res.rows.size(),
                 a.jsonl.c_str(), a.csv.c_str());
    return exit_ok;
}

int run_oracle_turan(int r, int k, const std::string& witness) {
    auto res = turan_number(r, k);
    std::cout << res.max_edges << "\n";
    if (!witness.empty()) {
        std::ofstream out(witness);
        if (!out) throw std::invalid_argument("cannot open output file: " + witness);
        write_graph(out, res.witness);
        std::fprintf(stderr, "witness -> %s\n", witness.c_str());
    }
    return exit_ok;
}

int run_oracle_arrow(const std::string& gspec, const std::string& hspec,
                     const std::string& witness) {
    auto g = resolve_target(gspec);
    auto h = resolve_target(hspec);
    auto res = arrow_check(g, h);
    std::cout << (res.arrows ? "true" : "false") << "\n";
    std::fprintf(stderr, "search nodes: %llu\n", static_cast<unsigned long long>(res.nodes));
    if (!res.arrows && !witness.empty()) {
        std::ofstream out(witness);
        if (!out) throw std::invalid_argument("cannot open output file: " + witness);
        out << "# edge coloring of the source with no monochromatic target copy\n";
        auto edges = g.edges();
        for (std::size_t t = 0; t < edges.size(); ++t)
            out << edges[t].first << ' ' << edges[t].second << ' '
                << (res.witness[t] == Color::Red ? 'R' : 'B') << "\n";
        std::fprintf(stderr, "witness -> %s\n", witness.c_str());
    }
    return exit_ok;
}

int run_oracle_ramsey(int m) {
    auto b = ramsey_bound(m);
    if (b.exact) {
        std::cout << *b.exact << "\n";
    } else {
        std::cout << b.lower << " " << b.upper << "\n";
        std::fprintf(stderr, "exact value unknown; printed lower and upper bounds\n");
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudorandom multipartite hosts, property audits, and monochromatic "
                 "bounded-degree embeddings"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* cg = app.add_subcommand("generate", "write a random multipartite host graph");
    cg->add_option("--r", gen.r, "number of parts")->required();
    cg->add_option("--n", gen.n, "vertices per part")->required();
    auto* optp = cg->add_option("--p", gen.p, "edge probability");
    auto* optc = cg->add_option("--c", gen.c, "probability constant C, p = C(ln N/N)^(1/delta)");
    optp->excludes(optc);
    optc->excludes(optp);
    cg->add_option("--delta", gen.delta, "target degree bound used with --c");
    cg->add_option("--seed", gen.seed, "generation seed");
    cg->add_option("--out", gen.out, "output graph file")->required();

    AuditArgs aud;
    auto* ca = app.add_subcommand("audit", "test a host for uniformity, congestion, bad triples");
    ca->add_option("--graph", aud.graph, "host graph file")->required();
    ca->add_option("--p", aud.p, "edge probability the host was drawn with")->required();
    ca->add_option("--schedule", aud.schedule, "constant schedule: practical:<delta> or file");
    ca->add_option("--samples", aud.samples, "sample budget per property");
    ca->add_option("--triples", aud.triples, "class triples to scan");
    ca->add_option("--class-size", aud.class_size, "triple class size (default ceil(N/ln N))");
    ca->add_option("--xi", aud.xi, "family-size fraction (default: schedule xi)");
    ca->add_option("--seed", aud.seed, "audit seed");
    ca->add_flag("--adversarial", aud.adversarial, "greedy congestion strategy");

    EmbedArgs emb;
    auto* ce = app.add_subcommand("embed", "embed a bounded-degree target monochromatically");
    ce->add_option("--graph", emb.graph, "host graph file")->required();
    auto* optcol = ce->add_option("--coloring", emb.coloring, "edge coloring file");
    auto* optstrat =
        ce->add_option("--color-strategy", emb.strategy,
                       "generate the coloring: uniform-random, all-red, majority-split, part-block");
    optcol->excludes(optstrat);
    optstrat->excludes(optcol);
    ce->add_option("--p", emb.p, "edge probability (default: estimated from edge density)");
    ce->add_option("--target", emb.target, "target spec (cycle:40, P10, path:4+cycle:6) or file")
        ->required();
    ce->add_option("--schedule", emb.schedule, "constant schedule: practical:<delta> or file");
    ce->add_option("--t0", emb.t0, "partition lower bound override");
    ce->add_option("--T0", emb.T0, "partition upper bound override");
    ce->add_option("--eps0", emb.eps0, "base epsilon override, rational like 1/2");
    ce->add_option("--eps-star", emb.eps_star, "chain-cap epsilon override, rational like 1/2");
    ce->add_option("--floor-frac", emb.floor_frac, "candidate-floor fraction override");
    ce->add_option("--delta-bar", emb.delta_bar, "class-count bound override");
    ce->add_option("--seed", emb.seed, "coloring/pipeline seed");
    ce->add_option("--out", emb.out, "write result JSON here instead of stdout");
    ce->add_flag("--debug-identity", emb.debug_identity,
                 "recompute candidate sets from scratch at every level");

    ExperimentArgs exp;
    auto* cx = app.add_subcommand("experiment", "run a seed-sweep grid from a config file");
    cx->add_option("config", exp.config, "experiment config file")->required();
    cx->add_option("--jsonl", exp.jsonl, "per-run output path");
    cx->add_option("--csv", exp.csv, "per-cell summary path");
    cx->add_option("--threads", exp.threads, "worker threads (capped by MONOEMBED_THREADS)");

    auto* co = app.add_subcommand("oracle", "exhaustive ground-truth oracles");
    co->require_subcommand(1);
    int tr = 0, tk = 0, rm = 0;
    std::string turan_witness, arrow_g, arrow_h, arrow_witness;
    auto* ct = co->add_subcommand("turan", "max edges without a transversal clique");
    ct->add_option("--r", tr, "parts")->required();
    ct->add_option("--k", tk, "vertices per part")->required();
    ct->add_option("--witness", turan_witness, "write the extremal graph here");
    auto* cw = co->add_subcommand("arrow", "does every 2-coloring contain a mono target copy");
    cw->set_help_flag("--help", "print help");  // frees -h for the target flag below
    cw->add_option("--g", arrow_g, "source graph: spec or file")->required();
    cw->add_option("--h", arrow_h, "target graph: spec or file")->required();
    cw->add_option("--witness", arrow_witness, "write an avoiding coloring here if one exists");
    auto* cr = co->add_subcommand("ramsey", "two-color Ramsey number of a complete graph");
    cr->add_option("--m", rm, "clique size")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (cg->parsed()) {
            if (gen.p < 0.0 && gen.c < 0.0)
                throw CLI::RequiredError("one of --p and --c");
            return run_generate(gen);
        }
        if (ca->parsed()) return run_audit(aud);
        if (ce->parsed()) {
            if (emb.coloring.empty() && emb.strategy.empty())
                throw CLI::RequiredError("one of --coloring and --color-strategy");
            return run_embed(emb);
        }
        if (cx->parsed()) return run_experiment_cmd(exp);
        if (co->parsed()) {
            if (ct->parsed()) return run_oracle_turan(tr, tk, turan_witness);
            if (cw->parsed()) return run_oracle_arrow(arrow_g, arrow_h, arrow_witness);
            if (cr->parsed()) return run_oracle_ramsey(rm);
        }
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return exit_usage;
    } catch (const OracleInfeasible& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return exit_infeasible;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_usage;
    }
    return exit_usage;
}
