#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "monoembed/constants.hpp"
#include "monoembed/embedder.hpp"
#include "monoembed/graph.hpp"
#include "monoembed/target.hpp"

namespace monoembed {

// Flat key=value config; a key listed more than once becomes a grid axis.
struct ConfigEntry {
    std::string key;
    std::vector<std::string> values;
};

struct ExperimentConfig {
    std::vector<ConfigEntry> entries;

    const ConfigEntry* find(const std::string& key) const {
        for (const auto& e : entries)
            if (e.key == key) return &e;
        return nullptr;
    }
};

namespace exp_detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "N",    "p",  "C",    "r",        "coloring",   "target",    "schedule",
        "t0",   "T0", "eps0", "eps_star", "floor_frac", "delta_bar", "seeds"};
    return keys;
}

}  // namespace exp_detail

inline ExperimentConfig parse_experiment_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = exp_detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        std::string key = exp_detail::trim(line.substr(0, eq));
        std::string value = exp_detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": empty key or value");
        const auto& known = exp_detail::known_keys();
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": unknown key '" + key + "'");
        bool appended = false;
        for (auto& e : cfg.entries)
            if (e.key == key) {
                e.values.push_back(value);
                appended = true;
            }
        if (!appended) cfg.entries.push_back({key, {value}});
    }
    return cfg;
}

// Seed list syntax: "a..b" inclusive range, "x,y,z" list, or one integer.
inline std::vector<std::uint64_t> parse_seed_list(const std::string& s) {
    std::vector<std::uint64_t> out;
    auto range = s.find("..");
    if (range != std::string::npos) {
        std::uint64_t a = std::stoull(s.substr(0, range));
        std::uint64_t b = std::stoull(s.substr(range + 2));
        if (b < a) throw std::invalid_argument("seed range runs backwards: " + s);
        if (b - a >= 100000) throw std::invalid_argument("seed range too large: " + s);
        for (std::uint64_t x = a; x <= b; ++x) out.push_back(x);
        return out;
    }
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = exp_detail::trim(tok);
        if (!tok.empty()) out.push_back(std::stoull(tok));
    }
    if (out.empty()) throw std::invalid_argument("empty seed list");
    return out;
}

struct CellParams {
    int index = 0;
    int N = 0;
    int r = 0;
    double p = 0.0;
    std::optional<double> C;
    std::string coloring = "uniform-random";
    std::string target;
    std::string schedule = "practical:2";
    std::map<std::string, std::string> overrides;
};

// Build the constant schedule a cell asks for: either "practical:<delta>"
// with the cell's override keys applied, or a schedule JSON file.
inline ConstantSchedule cell_schedule(const CellParams& cell) {
    const std::string prefix = "practical:";
    if (cell.schedule.rfind(prefix, 0) == 0) {
        int delta = std::stoi(cell.schedule.substr(prefix.size()));
        ScheduleOverrides ov;
        for (const auto& [k, v] : cell.overrides) {
            if (k == "t0") ov.t0 = std::stoi(v);
            else if (k == "T0") ov.T0 = std::stoi(v);
            else if (k == "eps0") ov.eps0 = parse_rational(v);
            else if (k == "eps_star") ov.eps_star = parse_rational(v);
            else if (k == "floor_frac") ov.floor_frac = std::stod(v);
            else if (k == "delta_bar") ov.delta_bar = std::stoi(v);
        }
        return practical_schedule(delta, ov);
    }
    std::ifstream in(cell.schedule);
    if (!in) throw std::invalid_argument("cannot open schedule file: " + cell.schedule);
    nlohmann::json j;
    in >> j;
    return schedule_from_json(j);
}

// Cartesian expansion of the grid axes, in file order with the
// last-listed axis varying fastest; `seeds` is per-cell replication, not
// an axis.
inline std::vector<CellParams> expand_grid(const ExperimentConfig& cfg) {
    for (const char* req : {"N", "r", "target"})
        if (!cfg.find(req)) throw std::invalid_argument(std::string("config misses ") + req);
    bool has_p = cfg.find("p") != nullptr, has_c = cfg.find("C") != nullptr;
    if (has_p == has_c)
        throw std::invalid_argument("config needs exactly one of p and C");

    std::vector<const ConfigEntry*> axes;
    for (const auto& e : cfg.entries)
        if (e.key != "seeds") axes.push_back(&e);

    std::vector<CellParams> cells;
    std::vector<std::size_t> pick(axes.size(), 0);
    while (true) {
        CellParams cell;
        cell.index = static_cast<int>(cells.size());
        for (std::size_t i = 0; i < axes.size(); ++i) {
            const std::string& key = axes[i]->key;
            const std::string& val = axes[i]->values[pick[i]];
            if (key == "N") cell.N = std::stoi(val);
            else if (key == "r") cell.r = std::stoi(val);
            else if (key == "p") cell.p = std::stod(val);
            else if (key == "C") cell.C = std::stod(val);
            else if (key == "coloring") cell.coloring = val;
            else if (key == "target") cell.target = val;
            else if (key == "schedule") cell.schedule = val;
            else cell.overrides[key] = val;
        }
        if (cell.N < 1 || cell.r < 2)
            throw std::invalid_argument("cell needs N >= 1 and r >= 2");
        if (cell.C) {
            auto sched = cell_schedule(cell);
            cell.p = edge_probability(cell.N, *cell.C, sched.delta).p;
        }
        parse_strategy(cell.coloring);
        cells.push_back(std::move(cell));

        std::size_t i = axes.size();
        while (i > 0) {
            --i;
            if (++pick[i] < axes[i]->values.size()) break;
            pick[i] = 0;
            if (i == 0) return cells;
        }
        if (axes.empty()) return cells;
    }
}

inline std::vector<std::uint64_t> config_seeds(const ExperimentConfig& cfg) {
    const auto* e = cfg.find("seeds");
    if (!e) return {1};
    std::vector<std::uint64_t> out;
    for (const auto& v : e->values)
        for (auto s : parse_seed_list(v)) out.push_back(s);
    return out;
}

struct RunRow {
    int cell = 0;
    std::uint64_t seed = 0;
    bool success = false;
    std::string color;
    int levels = 0;
    std::string stage;
    std::string detail;
    double seconds = 0.0;
    int transversals = 0;
    int selections = 0;
};

inline RunRow run_cell_once(const CellParams& cell, std::uint64_t seed) {
    RunRow row;
    row.cell = cell.index;
    row.seed = seed;
    auto t0 = std::chrono::steady_clock::now();
    try {
        auto sched = cell_schedule(cell);
        auto g = generate_random(cell.r, cell.N, cell.p, seed);
        auto col = color_edges(g, parse_strategy(cell.coloring), mix_seed(seed, 1));
        auto h = parse_target_spec(cell.target);
        EmbedOptions opt;
        opt.seed = seed;
        auto res = embed(g, col, h, sched, cell.p, opt);
        row.success = res.success;
        row.levels = res.levels;
        row.transversals = res.transversals_tried;
        row.selections = res.selections_certified;
        if (res.success) {
            row.color = res.color == Color::Red ? "red" : "blue";
        } else {
            row.stage = res.diagnostic->failed_stage;
            row.detail = res.diagnostic->detail;
        }
    } catch (const std::exception& e) {
        row.stage = "error";
        row.detail = e.what();
    }
    row.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

inline nlohmann::json run_row_to_json(const CellParams& cell, const RunRow& row) {
    nlohmann::json j;
    j["cell"] = row.cell;
    j["N"] = cell.N;
    j["r"] = cell.r;
    j["p"] = cell.p;
    if (cell.C) j["C"] = *cell.C;
    else j["C"] = nullptr;
    j["coloring"] = cell.coloring;
    j["target"] = cell.target;
    j["schedule"] = cell.schedule;
    j["seed"] = row.seed;
    j["success"] = row.success;
    j["color"] = row.success ? nlohmann::json(row.color) : nlohmann::json(nullptr);
    j["levels"] = row.levels;
    j["stage"] = row.success ? nlohmann::json(nullptr) : nlohmann::json(row.stage);
    j["detail"] = row.detail;
    j["seconds"] = row.seconds;
    j["transversals"] = row.transversals;
    j["selections"] = row.selections;
    return j;
}

struct CellSummary {
    CellParams params;
    int runs = 0;
    int successes = 0;
    std::map<std::string, int> stages;
    double time_p50 = 0.0;
    double time_p90 = 0.0;
    double time_max = 0.0;
};

namespace exp_detail {

inline double nearest_rank(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    auto rank = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(sorted.size()) - 1e-9));
    if (rank == 0) rank = 1;
    return sorted[std::min(rank - 1, sorted.size() - 1)];
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace exp_detail

struct ExperimentResult {
    std::vector<CellParams> cells;
    std::vector<std::uint64_t> seeds;
    std::vector<RunRow> rows;
    std::vector<CellSummary> summaries;
};

// Run every (cell, seed) pair on up to `threads` workers. Row order — and
// therefore every byte of the outputs — depends only on the config.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, int threads = 1) {
    ExperimentResult out;
    out.cells = expand_grid(cfg);
    out.seeds = config_seeds(cfg);
    const std::size_t jobs = out.cells.size() * out.seeds.size();
    out.rows.resize(jobs);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= jobs) return;
            const auto& cell = out.cells[i / out.seeds.size()];
            auto seed = out.seeds[i % out.seeds.size()];
            out.rows[i] = run_cell_once(cell, seed);
        }
    };
    int nt = std::max(1, std::min<int>(threads, static_cast<int>(jobs ? jobs : 1)));
    if (nt == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (const auto& cell : out.cells) {
        CellSummary s;
        s.params = cell;
        std::vector<double> times;
        for (std::size_t i = 0; i < out.seeds.size(); ++i) {
            const auto& row =
                out.rows[static_cast<std::size_t>(cell.index) * out.seeds.size() + i];
            ++s.runs;
            if (row.success) ++s.successes;
            else ++s.stages[row.stage];
            times.push_back(row.seconds);
        }
        std::sort(times.begin(), times.end());
        s.time_p50 = exp_detail::nearest_rank(times, 0.5);
        s.time_p90 = exp_detail::nearest_rank(times, 0.9);
        s.time_max = times.empty() ? 0.0 : times.back();
        out.summaries.push_back(std::move(s));
    }
    return out;
}

inline void write_jsonl(std::ostream& os, const ExperimentResult& res) {
    for (const auto& row : res.rows)
        os << run_row_to_json(res.cells[static_cast<std::size_t>(row.cell)], row).dump()
           << "\n";
}

inline void write_summary_csv(std::ostream& os, const ExperimentResult& res) {
    os << "cell,N,r,p,coloring,target,schedule,runs,successes,success_rate,"
          "stage_size_floor,stage_denseness,stage_hall,stage_clique_selection,stage_error,"
          "time_p50,time_p90,time_max\n";
    for (const auto& s : res.summaries) {
        auto stage = [&](const char* name) {
            auto it = s.stages.find(name);
            return it == s.stages.end() ? 0 : it->second;
        };
        char rate[32];
        std::snprintf(rate, sizeof rate, "%.4f",
                      s.runs ? static_cast<double>(s.successes) / s.runs : 0.0);
        char t50[32], t90[32], tmax[32];
        std::snprintf(t50, sizeof t50, "%.4f", s.time_p50);
        std::snprintf(t90, sizeof t90, "%.4f", s.time_p90);
        std::snprintf(tmax, sizeof tmax, "%.4f", s.time_max);
        char pbuf[32];
        std::snprintf(pbuf, sizeof pbuf, "%.6g", s.params.p);
        os << s.params.index << ',' << s.params.N << ',' << s.params.r << ',' << pbuf << ','
           << exp_detail::csv_field(s.params.coloring) << ','
           << exp_detail::csv_field(s.params.target) << ','
           << exp_detail::csv_field(s.params.schedule) << ',' << s.runs << ',' << s.successes
           << ',' << rate << ',' << stage(stage_size_floor) << ',' << stage(stage_denseness)
           << ',' << stage(stage_hall) << ',' << stage(stage_clique_selection) << ','
           << stage("error") << ',' << t50 << ',' << t90 << ',' << tmax << "\n";
    }
}

}  // namespace monoembed
