#include <catch2/catch_amalgamated.hpp>

#include "monoembed/oracles.hpp"
#include "monoembed/rng.hpp"

using namespace monoembed;

namespace {

bool has_transversal_clique(const MultipartiteGraph& g) {
    int r = g.r(), k = g.N();
    std::vector<int> pick(r, 0);
    while (true) {
        bool clique = true;
        for (int i = 0; i < r && clique; ++i)
            for (int j = i + 1; j < r && clique; ++j)
                if (!g.has_edge({i, pick[i]}, {j, pick[j]})) clique = false;
        if (clique) return true;
        int pos = r - 1;
        while (pos >= 0 && ++pick[pos] == k) pick[pos--] = 0;
        if (pos < 0) return false;
    }
}

}  // namespace

TEST_CASE("turan numbers match the closed form") {
    struct Case { int r, k; std::uint64_t expect; };
    for (auto [r, k, expect] : {Case{2, 1, 0}, Case{2, 2, 0}, Case{2, 3, 0}, Case{3, 1, 2},
                                Case{3, 2, 8}, Case{4, 1, 5}, Case{4, 2, 20}}) {
        auto res = turan_number(r, k);
        INFO("r=" << r << " k=" << k);
        CHECK(res.max_edges == expect);
        // (C(r,2)-1) * k^2
        std::uint64_t closed = (static_cast<std::uint64_t>(r) * (r - 1) / 2 - 1) *
                               static_cast<std::uint64_t>(k) * k;
        CHECK(res.max_edges == closed);
        CHECK(res.witness.edge_count() == expect);
        CHECK_FALSE(has_transversal_clique(res.witness));
    }
}

TEST_CASE("turan oracle refuses infeasible instances") {
    CHECK_THROWS_AS(turan_number(5, 2), OracleInfeasible);
    CHECK_THROWS_AS(turan_number(2, 5), OracleInfeasible);
    CHECK_THROWS_AS(turan_number(1, 1), std::invalid_argument);
}

TEST_CASE("arrow relation on small instances") {
    CHECK(arrow_check(complete_graph(3), path_graph(3)).arrows);
    CHECK_FALSE(arrow_check(path_graph(3), path_graph(3)).arrows);
    CHECK_FALSE(arrow_check(complete_graph(5), complete_graph(3)).arrows);
    CHECK(arrow_check(complete_graph(6), complete_graph(3)).arrows);
}

TEST_CASE("arrow witness avoids monochromatic copies") {
    auto g = complete_graph(5);
    auto res = arrow_check(g, complete_graph(3));
    REQUIRE_FALSE(res.arrows);
    auto edges = g.edges();
    REQUIRE(res.witness.size() == edges.size());
    // No monochromatic triangle in the witness coloring.
    for (int a = 0; a < 5; ++a)
        for (int b = a + 1; b < 5; ++b)
            for (int c = b + 1; c < 5; ++c) {
                auto col = [&](int u, int v) {
                    for (std::size_t t = 0; t < edges.size(); ++t)
                        if ((edges[t].first == u && edges[t].second == v) ||
                            (edges[t].first == v && edges[t].second == u))
                            return res.witness[t];
                    throw std::logic_error("edge not found");
                };
                bool mono = col(a, b) == col(a, c) && col(a, c) == col(b, c);
                CHECK_FALSE(mono);
            }
}

TEST_CASE("arrow budget and degenerate targets") {
    CHECK_THROWS_AS(arrow_check(complete_graph(7), complete_graph(3)), OracleInfeasible);
    CHECK_THROWS_AS(arrow_check(complete_graph(4), TargetGraph(2)), std::invalid_argument);
    // Target absent from the host: no coloring can contain it.
    CHECK_FALSE(arrow_check(matching_graph(3), path_graph(3)).arrows);
}

TEST_CASE("exact regularity ground truth on the one-edge pair") {
    MultipartiteGraph g(2, 2);
    g.add_edge({0, 0}, {1, 0});
    VertexSet x{0, {0, 1}}, y{1, {0, 1}};
    auto res = exact_regularity(g, x, y, 1.0, 0.3);
    CHECK_FALSE(res.regular);
    CHECK(res.base_density == 0.25);
    CHECK(res.max_deviation == 0.75);
    CHECK(res.subpairs == 9);
    CHECK(res.worst.deviation == 0.75);
    CHECK(res.worst.xsub.size() == 1);
    CHECK(res.worst.ysub.size() == 1);
}

TEST_CASE("exact regularity accepts complete and empty pairs") {
    auto g = generate_random(2, 6, 1.0, 1);
    VertexSet x{0, {0, 1, 2, 3, 4, 5}}, y{1, {0, 1, 2, 3, 4, 5}};
    auto res = exact_regularity(g, x, y, 1.0, 0.2);
    CHECK(res.regular);
    CHECK(res.max_deviation == 0.0);

    MultipartiteGraph e(2, 6);
    auto res2 = exact_regularity(e, x, y, 0.5, 0.2);
    CHECK(res2.regular);
    CHECK(res2.base_density == 0.0);
}

TEST_CASE("exact regularity with eps = 1 only sees the full pair") {
    auto g = generate_random(2, 5, 0.6, 3);
    VertexSet x{0, {0, 1, 2, 3, 4}}, y{1, {0, 1, 2, 3, 4}};
    auto res = exact_regularity(g, x, y, 0.6, 1.0);
    CHECK(res.regular);
    CHECK(res.subpairs == 1);
}

TEST_CASE("exact regularity budget") {
    VertexSet x{0, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}}, y{1, {0, 1, 2, 3, 4, 5, 6, 7, 8}};
    auto g = generate_random(2, 10, 0.5, 1);
    CHECK_THROWS_AS(exact_regularity(g, x, y, 0.5, 0.3), OracleInfeasible);
}

TEST_CASE("ramsey table and bounds") {
    CHECK(ramsey_bound(1).exact == 1);
    CHECK(ramsey_bound(2).exact == 2);
    CHECK(ramsey_bound(3).exact == 6);
    CHECK(ramsey_bound(4).exact == 18);
    auto b5 = ramsey_bound(5);
    CHECK_FALSE(b5.exact.has_value());
    CHECK(b5.lower == 5);
    CHECK(b5.upper == 70);
    auto b18 = ramsey_bound(18);
    CHECK(b18.lower == 512);
    CHECK(b18.upper == 2333606220ull);
    CHECK_THROWS_AS(ramsey_bound(0), std::invalid_argument);
    CHECK_THROWS_AS(ramsey_bound(40), OracleInfeasible);
}

TEST_CASE("binomial helper") {
    CHECK(binomial_u64(34, 17) == 2333606220ull);
    CHECK(binomial_u64(6, 3) == 20);
    CHECK(binomial_u64(5, 0) == 1);
    CHECK(binomial_u64(3, 5) == 0);
}
