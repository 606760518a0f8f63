#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "monoembed/constants.hpp"

using namespace monoembed;

TEST_CASE("worked parameter stack at delta = 2, T0 = 64") {
    auto s = theoretical_schedule(2, 64);
    CHECK(s.mu == Rat(1, 16));
    CHECK(s.alpha == Rat(1, 3));
    CHECK(s.eps_star == Rat(1, 12));
    CHECK(s.eps0 == Rat(1, 12));
    CHECK(s.eps == Rat(1, 24));
    CHECK(s.delta_bar == 18);
    CHECK(s.xi == Rat(1, 24576));
    CHECK(s.B == Rat(24576));
    CHECK(s.gamma == Rat(23, 6144));
    CHECK(s.lambda == 2);
    CHECK(s.t0 == 1);
    CHECK(s.eps_chain.size() == 19);
    for (const auto& e : s.eps_chain) CHECK(e == s.eps_star);
    CHECK_FALSE(s.chain_constructive);
}

TEST_CASE("beta exponent") {
    auto s = theoretical_schedule(2, 64);
    // 8/(alpha*mu) with alpha = 1/3, mu = 1/16.
    double exponent = 8.0 / (rat_value(s.alpha) * rat_value(s.mu));
    CHECK(exponent == Catch::Approx(384.0));
    double expected_log = 2.0 * std::log(1.0 / 3.0) - std::log(4.0) - 2.0 - 384.0;
    CHECK(s.beta_log == Catch::Approx(expected_log));
    CHECK(s.beta == Catch::Approx(std::exp(expected_log)));
    CHECK(s.beta > 0.0);
}

TEST_CASE("worked parameter stack at delta = 3, T0 = 64") {
    auto s = theoretical_schedule(3, 64);
    CHECK(s.delta_bar == 84);
    CHECK(s.xi == Rat(1, 98304));
    CHECK(s.eps_star == Rat(1, 18));
    CHECK(s.mu == Rat(1, 36));
}

TEST_CASE("exactness identities across the parameter grid") {
    for (int delta : {2, 3, 4}) {
        for (int T0 : {8, 64}) {
            auto s = theoretical_schedule(delta, T0);
            CHECK(s.xi * s.B == Rat(1));
            CHECK(s.gamma * Rat(pow_ll(4, delta - 1)) * Rat(T0) == Rat(1) - s.eps);
        }
    }
}

TEST_CASE("class-count bound identity") {
    for (long long d = 2; d <= 10; ++d) {
        CHECK(pow_ll(d, 4) + d == (d * d * d - d * d + d) * (d + 1));
    }
}

TEST_CASE("practical schedule with desk overrides") {
    ScheduleOverrides ov;
    ov.T0 = 8;
    ov.eps0 = parse_rational("0.2");
    ov.eps_star = parse_rational("0.3");
    auto s = practical_schedule(2, ov);
    CHECK(s.xi == Rat(1, 3072));
    CHECK(s.B == Rat(3072));
    CHECK(s.eps0 == Rat(1, 5));
    CHECK(s.eps == Rat(1, 10));
    CHECK(s.eps_star == Rat(3, 10));
    CHECK_FALSE(s.deviations.empty());
    CHECK(s.eps_chain.front() == Rat(1, 5));
    CHECK(s.eps_chain.back() == Rat(3, 10));
}

TEST_CASE("practical without overrides matches theoretical values") {
    auto p = practical_schedule(2);
    auto t = theoretical_schedule(2, 64);
    CHECK(p.mode == ScheduleMode::Practical);
    CHECK(p.delta_bar == t.delta_bar);
    CHECK(p.T0 == t.T0);
    CHECK(p.t0 == t.t0);
    CHECK(p.mu == t.mu);
    CHECK(p.alpha == t.alpha);
    CHECK(p.eps_star == t.eps_star);
    CHECK(p.eps0 == t.eps0);
    CHECK(p.eps == t.eps);
    CHECK(p.xi == t.xi);
    CHECK(p.gamma == t.gamma);
    CHECK(p.beta == t.beta);
    CHECK(p.floor_frac == t.floor_frac);
    CHECK(p.eps_chain == t.eps_chain);
    CHECK(p.deviations.empty());
}

TEST_CASE("schedule validation rejects inconsistent overrides") {
    ScheduleOverrides ov;
    ov.eps0 = parse_rational("0.5");
    ov.eps_star = parse_rational("0.1");
    CHECK_THROWS_AS(practical_schedule(2, ov), std::invalid_argument);

    ScheduleOverrides ov2;
    ov2.floor_frac = 0.0;
    CHECK_THROWS_AS(practical_schedule(2, ov2), std::invalid_argument);

    ScheduleOverrides ov3;
    ov3.t0 = 100;
    ov3.T0 = 4;
    CHECK_THROWS_AS(practical_schedule(2, ov3), std::invalid_argument);
}

TEST_CASE("edge probability uses the natural logarithm") {
    auto a = edge_probability(100, 1.0, 1);
    CHECK(a.p == Catch::Approx(std::log(100.0) / 100.0));
    CHECK(a.p == Catch::Approx(0.0460517).epsilon(1e-5));
    CHECK_FALSE(a.clamped);

    auto b = edge_probability(1000, 1.0, 2);
    CHECK(b.p == Catch::Approx(std::sqrt(std::log(1000.0) / 1000.0)));
    CHECK(b.p == Catch::Approx(0.0831129068).epsilon(1e-6));

    auto c = edge_probability(3, 50.0, 1);
    CHECK(c.clamped);
    CHECK(c.p == 1.0);

    CHECK_THROWS_AS(edge_probability(100, 0.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(edge_probability(100, -1.0, 2), std::invalid_argument);
}

TEST_CASE("n0 floor from the regularity inputs") {
    auto s = theoretical_schedule(2, 8, 1000.0, 0.5);
    REQUIRE(s.log_n0.has_value());
    double e = rat_value(s.eps);
    double expect = std::max({std::log(1000.0 / rat_value(s.B)), 2.0, 8.0 / (e * (1.0 - e))});
    CHECK(*s.log_n0 == Catch::Approx(expect));
    CHECK(theoretical_schedule(2, 8).n0.has_value() == false);
}

TEST_CASE("schedule JSON round-trip is exact") {
    ScheduleOverrides ov;
    ov.t0 = 4;
    ov.T0 = 16;
    ov.eps0 = parse_rational("0.25");
    ov.eps_star = parse_rational("0.5");
    ov.floor_frac = 0.5;
    auto s = practical_schedule(2, ov);
    auto j = schedule_to_json(s);
    auto back = schedule_from_json(j);
    CHECK(back.mu == s.mu);
    CHECK(back.eps0 == s.eps0);
    CHECK(back.eps_chain == s.eps_chain);
    CHECK(back.xi == s.xi);
    CHECK(back.gamma == s.gamma);
    CHECK(back.floor_frac == s.floor_frac);
    CHECK(back.t0 == 4);
    CHECK(back.deviations == s.deviations);
}

TEST_CASE("compact schedule specs") {
    nlohmann::json j = {{"delta", 2},
                        {"overrides", {{"t0", 4}, {"T0", 16}, {"eps0", "0.25"}, {"eps_star", "0.5"}}}};
    auto s = schedule_from_spec(j);
    CHECK(s.t0 == 4);
    CHECK(s.eps0 == Rat(1, 4));
    auto full = schedule_from_spec(schedule_to_json(s));
    CHECK(full.eps0 == s.eps0);
}

TEST_CASE("rational parsing") {
    CHECK(parse_rational("3/4") == Rat(3, 4));
    CHECK(parse_rational("0.125") == Rat(1, 8));
    CHECK(parse_rational("2") == Rat(2));
    CHECK(parse_rational("-0.5") == Rat(-1, 2));
    CHECK_THROWS(parse_rational("1/0"));
    CHECK_THROWS(parse_rational("x"));
}
