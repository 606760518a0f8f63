#pragma once

#include <boost/rational.hpp>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace monoembed {

using Rat = boost::rational<long long>;

inline double rat_value(const Rat& q) {
    return static_cast<double>(q.numerator()) / static_cast<double>(q.denominator());
}

// Accepts "a/b", plain integers, and finite decimals ("0.25" -> 1/4),
// parsed exactly.
inline Rat parse_rational(const std::string& s) {
    auto bad = [&] { throw std::invalid_argument("cannot parse rational: " + s); };
    if (s.empty()) bad();
    std::size_t slash = s.find('/');
    if (slash != std::string::npos) {
        long long n = std::stoll(s.substr(0, slash));
        long long d = std::stoll(s.substr(slash + 1));
        if (d == 0) bad();
        return Rat(n, d);
    }
    std::size_t dot = s.find('.');
    if (dot == std::string::npos) return Rat(std::stoll(s));
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    std::size_t frac_len = s.size() - dot - 1;
    if (frac_len > 17) bad();
    long long den = 1;
    for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
    return Rat(std::stoll(digits), den);
}

inline long long pow_ll(long long base, int e) {
    long long v = 1;
    for (int i = 0; i < e; ++i) v *= base;
    return v;
}

struct EdgeProbability {
    double p = 0.0;
    bool clamped = false;
};

// p = C * (ln N / N)^{1/delta}, clamped into [0,1].
inline EdgeProbability edge_probability(int N, double C, int delta) {
    if (C <= 0.0) throw std::invalid_argument("probability constant C must be positive");
    if (N < 2) throw std::invalid_argument("edge probability needs N >= 2");
    if (delta < 1) throw std::invalid_argument("edge probability needs delta >= 1");
    double v = C * std::pow(std::log(static_cast<double>(N)) / static_cast<double>(N),
                            1.0 / static_cast<double>(delta));
    EdgeProbability out;
    out.clamped = v > 1.0;
    out.p = out.clamped ? 1.0 : v;
    return out;
}

enum class ScheduleMode { Theoretical, Practical };

// Every parameter the pipeline consumes, kept exact where exactness is
// testable. Derived identities: xi * B = 1, gamma * 4^{delta-1} * T0 =
// 1 - eps, delta_bar = delta^4 + delta = (delta^3 - delta^2 + delta)(delta + 1).
struct ConstantSchedule {
    ScheduleMode mode = ScheduleMode::Theoretical;
    int delta = 0;
    int delta_bar = 0;
    int T0 = 0;
    int t0 = 1;
    int lambda = 2;
    Rat mu;
    Rat alpha;
    Rat eps_star;
    Rat eps0;
    Rat eps;
    std::vector<Rat> eps_chain;
    bool chain_constructive = false;
    Rat xi;
    Rat B;
    Rat gamma;
    double beta = 0.0;
    double beta_log = 0.0;
    double floor_frac = 1.0;
    std::vector<double> c_congestion;
    double c_dense = 0.0;
    std::optional<double> n0;
    std::optional<double> log_n0;
    std::vector<std::string> deviations;
};

namespace detail {
inline void finish_schedule(ConstantSchedule& s) {
    s.eps = s.eps0 / 2;
    s.delta_bar = static_cast<int>(pow_ll(s.delta, 4) + s.delta);
    s.xi = Rat(1, 6 * pow_ll(4, s.delta + 1) * s.T0);
    s.B = Rat(1) / s.xi;
    s.gamma = (Rat(1) - s.eps) / Rat(pow_ll(4, s.delta - 1) * s.T0);
    double a = rat_value(s.alpha), m = rat_value(s.mu);
    s.beta_log = 2.0 * std::log(a) - std::log(4.0) - 2.0 - 8.0 / (a * m);
    s.beta = std::exp(s.beta_log);
    s.c_congestion.clear();
    for (int k = 1; k <= s.delta; ++k)
        s.c_congestion.push_back(
            std::pow(static_cast<double>(k + 2) / (3.0 * rat_value(s.xi)), 1.0 / k));
    s.c_dense = std::pow(4.0 / rat_value(s.gamma), 1.0 / s.delta);
}
}  // namespace detail

// The parameter stack as proved: the regularity epsilon chain cannot be
// constructed level by level (each level's value depends on quantities the
// proof only bounds), so it is pinned to the constant eps_star and the
// schedule is flagged non-constructive.
inline ConstantSchedule theoretical_schedule(int delta, int T0,
                                             std::optional<double> N0 = std::nullopt,
                                             std::optional<double> eta = std::nullopt) {
    if (delta < 1 || delta > 10) throw std::invalid_argument("delta outside [1,10]");
    if (T0 < 1) throw std::invalid_argument("T0 must be positive");
    ConstantSchedule s;
    s.mode = ScheduleMode::Theoretical;
    s.delta = delta;
    s.T0 = T0;
    s.t0 = 1;
    s.lambda = 2;
    s.mu = Rat(1, 4 * delta * delta);
    s.alpha = Rat(1, 3);
    s.eps_star = Rat(1, 6 * delta);
    s.eps0 = s.eps_star;
    s.floor_frac = 1.0;
    detail::finish_schedule(s);
    s.eps_chain.assign(static_cast<std::size_t>(s.delta_bar) + 1, s.eps_star);
    s.chain_constructive = false;
    if (N0 && eta) {
        if (*eta <= 0.0 || *N0 <= 0.0) throw std::invalid_argument("N0 and eta must be positive");
        double e = rat_value(s.eps);
        double l1 = std::log(*N0 / rat_value(s.B));
        double l2 = 1.0 / *eta;
        double l3 = static_cast<double>(T0) / (e * (1.0 - e));
        s.log_n0 = std::max({l1, l2, l3});
        s.n0 = std::exp(*s.log_n0);
    }
    return s;
}

struct ScheduleOverrides {
    std::optional<int> T0;
    std::optional<int> t0;
    std::optional<Rat> eps0;
    std::optional<Rat> eps_star;
    std::optional<Rat> mu;
    std::optional<Rat> alpha;
    std::optional<double> floor_frac;
    std::optional<int> delta_bar;
};

// Theoretical values with desk-scale overrides applied; every override is
// recorded in the schedule's deviation list and the invariants are
// re-validated afterwards.
inline ConstantSchedule practical_schedule(int delta, const ScheduleOverrides& ov = {}) {
    ConstantSchedule s = theoretical_schedule(delta, ov.T0.value_or(64));
    s.mode = ScheduleMode::Practical;
    auto note = [&](const std::string& d) { s.deviations.push_back(d); };
    if (ov.T0) note("T0=" + std::to_string(*ov.T0));
    if (ov.t0) { s.t0 = *ov.t0; note("t0=" + std::to_string(*ov.t0)); }
    if (ov.mu) { s.mu = *ov.mu; note("mu overridden"); }
    if (ov.alpha) { s.alpha = *ov.alpha; note("alpha overridden"); }
    if (ov.eps_star) { s.eps_star = *ov.eps_star; note("eps_star overridden"); }
    if (ov.eps0) { s.eps0 = *ov.eps0; note("eps0 overridden"); }
    else s.eps0 = s.eps_star;
    if (ov.floor_frac) { s.floor_frac = *ov.floor_frac; note("floor_frac overridden"); }
    detail::finish_schedule(s);
    if (ov.delta_bar) { s.delta_bar = *ov.delta_bar; note("delta_bar overridden"); }
    s.eps_chain.assign(static_cast<std::size_t>(s.delta_bar) + 1, s.eps_star);
    s.eps_chain[0] = s.eps0;
    s.chain_constructive = true;

    if (s.t0 < 1) throw std::invalid_argument("schedule invalid: t0 < 1");
    if (s.T0 < s.t0) throw std::invalid_argument("schedule invalid: T0 < t0");
    if (s.eps0 <= Rat(0) || s.eps0 > s.eps_star)
        throw std::invalid_argument("schedule invalid: need 0 < eps0 <= eps_star");
    if (s.eps_star >= Rat(1)) throw std::invalid_argument("schedule invalid: eps_star >= 1");
    if (s.mu <= Rat(0) || s.mu >= Rat(1))
        throw std::invalid_argument("schedule invalid: mu outside (0,1)");
    if (s.alpha <= Rat(0) || s.alpha >= Rat(1))
        throw std::invalid_argument("schedule invalid: alpha outside (0,1)");
    if (s.floor_frac <= 0.0 || s.floor_frac > 1.0)
        throw std::invalid_argument("schedule invalid: floor_frac outside (0,1]");
    for (std::size_t i = 1; i < s.eps_chain.size(); ++i)
        if (s.eps_chain[i] < s.eps_chain[i - 1])
            throw std::invalid_argument("schedule invalid: eps chain not monotone");
    return s;
}

inline nlohmann::json rat_json(const Rat& q) {
    return nlohmann::json{{"num", q.numerator()}, {"den", q.denominator()}};
}

inline Rat rat_from_json(const nlohmann::json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rat(j.get<long long>());
    return Rat(j.at("num").get<long long>(), j.at("den").get<long long>());
}

inline nlohmann::json schedule_to_json(const ConstantSchedule& s) {
    nlohmann::json j;
    j["mode"] = s.mode == ScheduleMode::Theoretical ? "theoretical" : "practical";
    j["delta"] = s.delta;
    j["delta_bar"] = s.delta_bar;
    j["T0"] = s.T0;
    j["t0"] = s.t0;
    j["lambda"] = s.lambda;
    j["mu"] = rat_json(s.mu);
    j["alpha"] = rat_json(s.alpha);
    j["eps_star"] = rat_json(s.eps_star);
    j["eps0"] = rat_json(s.eps0);
    j["eps"] = rat_json(s.eps);
    nlohmann::json chain = nlohmann::json::array();
    for (const auto& q : s.eps_chain) chain.push_back(rat_json(q));
    j["eps_chain"] = chain;
    j["chain_constructive"] = s.chain_constructive;
    j["xi"] = rat_json(s.xi);
    j["B"] = rat_json(s.B);
    j["gamma"] = rat_json(s.gamma);
    j["beta"] = s.beta;
    j["beta_log"] = s.beta_log;
    j["floor_frac"] = s.floor_frac;
    j["c_congestion"] = s.c_congestion;
    j["c_dense"] = s.c_dense;
    if (s.n0) j["n0"] = *s.n0;
    if (s.log_n0) j["log_n0"] = *s.log_n0;
    j["deviations"] = s.deviations;
    return j;
}

inline ConstantSchedule schedule_from_json(const nlohmann::json& j) {
    ConstantSchedule s;
    std::string mode = j.at("mode").get<std::string>();
    if (mode == "theoretical") s.mode = ScheduleMode::Theoretical;
    else if (mode == "practical") s.mode = ScheduleMode::Practical;
    else throw std::invalid_argument("unknown schedule mode: " + mode);
    s.delta = j.at("delta").get<int>();
    s.delta_bar = j.at("delta_bar").get<int>();
    s.T0 = j.at("T0").get<int>();
    s.t0 = j.at("t0").get<int>();
    s.lambda = j.at("lambda").get<int>();
    s.mu = rat_from_json(j.at("mu"));
    s.alpha = rat_from_json(j.at("alpha"));
    s.eps_star = rat_from_json(j.at("eps_star"));
    s.eps0 = rat_from_json(j.at("eps0"));
    s.eps = rat_from_json(j.at("eps"));
    for (const auto& e : j.at("eps_chain")) s.eps_chain.push_back(rat_from_json(e));
    s.chain_constructive = j.at("chain_constructive").get<bool>();
    s.xi = rat_from_json(j.at("xi"));
    s.B = rat_from_json(j.at("B"));
    s.gamma = rat_from_json(j.at("gamma"));
    s.beta = j.at("beta").get<double>();
    s.beta_log = j.value("beta_log", 0.0);
    s.floor_frac = j.at("floor_frac").get<double>();
    s.c_congestion = j.at("c_congestion").get<std::vector<double>>();
    s.c_dense = j.at("c_dense").get<double>();
    if (j.contains("n0")) s.n0 = j["n0"].get<double>();
    if (j.contains("log_n0")) s.log_n0 = j["log_n0"].get<double>();
    s.deviations = j.value("deviations", std::vector<std::string>{});
    return s;
}

// Compact spec form used by config files: {"delta": 2, "overrides":
// {"t0": 4, "eps0": "0.25", ...}} builds a practical schedule; a full
// serialized schedule (with an "eps_chain") is loaded verbatim.
inline ConstantSchedule schedule_from_spec(const nlohmann::json& j) {
    if (j.contains("eps_chain")) return schedule_from_json(j);
    int delta = j.at("delta").get<int>();
    ScheduleOverrides ov;
    if (j.contains("overrides")) {
        const auto& o = j["overrides"];
        if (o.contains("T0")) ov.T0 = o["T0"].get<int>();
        if (o.contains("t0")) ov.t0 = o["t0"].get<int>();
        if (o.contains("eps0")) ov.eps0 = rat_from_json(o["eps0"]);
        if (o.contains("eps_star")) ov.eps_star = rat_from_json(o["eps_star"]);
        if (o.contains("mu")) ov.mu = rat_from_json(o["mu"]);
        if (o.contains("alpha")) ov.alpha = rat_from_json(o["alpha"]);
        if (o.contains("floor_frac")) ov.floor_frac = o["floor_frac"].get<double>();
        if (o.contains("delta_bar")) ov.delta_bar = o["delta_bar"].get<int>();
    }
    return practical_schedule(delta, ov);
}

}  // namespace monoembed
