#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct CmdResult {
    int exit_code = -1;
    std::string out;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Runs the installed binary with stdout captured and stderr dropped.
CmdResult run(const std::string& args) {
    static int counter = 0;
    fs::path out = fs::temp_directory_path() / ("monoembed_cli_out_" +
                                                std::to_string(counter++) + ".txt");
    std::string cmd = std::string(MONOEMBED_BIN) + " " + args + " > " + out.string() +
                      " 2>/dev/null";
    int status = std::system(cmd.c_str());
    CmdResult res;
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    res.out = slurp(out);
    fs::remove(out);
    return res;
}

fs::path scratch_dir() {
    auto dir = fs::temp_directory_path() / "monoembed_cli_scratch";
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("generate writes host files and rejects contradictory flags") {
    auto dir = scratch_dir();
    auto g = (dir / "g.mpg").string();

    auto ok = run("generate --r 3 --n 100 --p 0.3 --seed 1 --out " + g);
    REQUIRE(ok.exit_code == 0);
    std::ifstream in(g);
    std::string header;
    std::getline(in, header);
    REQUIRE(header == "mpg 3 100");

    auto conflict = run("generate --r 3 --n 100 --p 0.3 --c 1.0 --out " + g);
    REQUIRE(conflict.exit_code == 1);

    auto neither = run("generate --r 3 --n 100 --out " + g);
    REQUIRE(neither.exit_code == 1);
}

TEST_CASE("generate is deterministic per seed") {
    auto dir = scratch_dir();
    auto a = (dir / "a.mpg").string(), b = (dir / "b.mpg").string(),
         c = (dir / "c.mpg").string();
    REQUIRE(run("generate --r 3 --n 40 --p 0.5 --seed 9 --out " + a).exit_code == 0);
    REQUIRE(run("generate --r 3 --n 40 --p 0.5 --seed 9 --out " + b).exit_code == 0);
    REQUIRE(run("generate --r 3 --n 40 --p 0.5 --seed 10 --out " + c).exit_code == 0);
    REQUIRE(slurp(a) == slurp(b));
    REQUIRE(slurp(a) != slurp(c));
}

TEST_CASE("oracle subcommands print values and refuse infeasible budgets") {
    auto turan = run("oracle turan --r 3 --k 2");
    REQUIRE(turan.exit_code == 0);
    REQUIRE(turan.out == "8\n");

    REQUIRE(run("oracle turan --r 5 --k 5").exit_code == 3);

    auto ramsey = run("oracle ramsey --m 3");
    REQUIRE(ramsey.exit_code == 0);
    REQUIRE(ramsey.out == "6\n");

    REQUIRE(run("oracle ramsey --m 40").exit_code == 3);

    auto yes = run("oracle arrow --g complete:6 --h complete:3");
    REQUIRE(yes.exit_code == 0);
    REQUIRE(yes.out == "true\n");

    auto dir = scratch_dir();
    auto wit = (dir / "avoid.txt").string();
    auto no = run("oracle arrow --g complete:5 --h complete:3 --witness " + wit);
    REQUIRE(no.exit_code == 0);
    REQUIRE(no.out == "false\n");
    REQUIRE(fs::exists(wit));
    auto text = slurp(wit);
    REQUIRE(text.find(" R") != std::string::npos);
    REQUIRE(text.find(" B") != std::string::npos);
}

TEST_CASE("embed succeeds on a trivial host and reports structured failures") {
    auto dir = scratch_dir();
    auto g = (dir / "host.mpg").string();
    REQUIRE(run("generate --r 5 --n 50 --p 1.0 --seed 1 --out " + g).exit_code == 0);

    auto ok = run("embed --graph " + g + " --color-strategy all-red --target P10 --p 1.0");
    REQUIRE(ok.exit_code == 0);
    auto j = nlohmann::json::parse(ok.out);
    REQUIRE(j.at("success").get<bool>());
    REQUIRE(j.at("color").get<std::string>() == "red");
    REQUIRE(j.at("phi").size() == 10);

    auto fail = run("embed --graph " + g + " --color-strategy all-red --target cycle:300 --p 1.0");
    REQUIRE(fail.exit_code == 2);
    auto d = nlohmann::json::parse(fail.out);
    REQUIRE_FALSE(d.at("success").get<bool>());
    REQUIRE(d.at("diagnostic").at("failed_stage").get<std::string>() == "size-floor");

    REQUIRE(run("embed --graph " + (dir / "missing.mpg").string() +
                " --color-strategy all-red --target P10")
                .exit_code == 1);
}

TEST_CASE("audit emits one report line per property") {
    auto dir = scratch_dir();
    auto g = (dir / "full3.mpg").string();
    REQUIRE(run("generate --r 3 --n 30 --p 1.0 --seed 1 --out " + g).exit_code == 0);

    auto res = run("audit --graph " + g + " --p 1.0 --samples 20 --triples 2 --seed 2");
    REQUIRE(res.exit_code == 0);
    std::istringstream lines(res.out);
    std::string line;
    std::vector<std::string> props;
    while (std::getline(lines, line)) {
        auto j = nlohmann::json::parse(line);
        props.push_back(j.at("property").get<std::string>());
        REQUIRE(j.at("verdict").get<std::string>() == "holds");
    }
    REQUIRE(props == std::vector<std::string>{"uniformity", "congestion", "congestion",
                                              "bad-triples"});
}

TEST_CASE("experiment writes per-run JSONL and per-cell CSV") {
    auto dir = scratch_dir();
    auto cfg = dir / "tiny.cfg";
    {
        std::ofstream out(cfg);
        out << "N = 12\nr = 5\np = 1.0\ncoloring = all-red\ntarget = cycle:12\nseeds = 1..2\n";
    }
    auto jsonl = (dir / "rows.jsonl").string();
    auto csv = (dir / "cells.csv").string();
    auto res = run("experiment " + cfg.string() + " --jsonl " + jsonl + " --csv " + csv);
    REQUIRE(res.exit_code == 0);

    std::ifstream rows(jsonl);
    std::string line;
    int count = 0;
    while (std::getline(rows, line)) {
        auto j = nlohmann::json::parse(line);
        REQUIRE(j.at("success").get<bool>());
        REQUIRE(j.at("target").get<std::string>() == "cycle:12");
        ++count;
    }
    REQUIRE(count == 2);

    auto csv_text = slurp(csv);
    REQUIRE(csv_text.find("cell,N,r,p,coloring,target,schedule,runs,successes,success_rate") == 0);
    REQUIRE(csv_text.find("\n0,12,5,1,all-red,cycle:12,practical:2,2,2,1.0000,") !=
            std::string::npos);

    REQUIRE(run("experiment " + (dir / "no_such.cfg").string()).exit_code == 1);
}

TEST_CASE("unknown subcommands are usage errors") {
    REQUIRE(run("frobnicate").exit_code == 1);
    REQUIRE(run("").exit_code == 1);
}
