#include "smc/evaluation.hpp"

#include "fixtures.hpp"

#include <doctest.h>

using namespace smc;
using namespace smc::test;

namespace {

PolicySpec spec(PolicyKind kind, double beta = 0.95, double mu = 1.0) {
    PolicySpec p;
    p.kind = kind;
    p.config.risk = {beta, mu};
    return p;
}

}  // namespace

TEST_CASE("policy names") {
    for (auto k : {PolicyKind::cvar_risk_limiting, PolicyKind::expected_wind, PolicyKind::no_wind})
        CHECK(parse_policy(to_string(k)) == k);
    CHECK(parse_policy("cvar") == PolicyKind::cvar_risk_limiting);
    CHECK_THROWS_AS(parse_policy("optimistic"), std::invalid_argument);
}

TEST_CASE("pinned policies") {
    const auto inst = random_instance(3, 20);
    const auto& nc = inst.network;
    const auto none = dispatch_policy(spec(PolicyKind::no_wind), nc, inst.prices, inst.scenarios);
    CHECK(none.p_wind.cwiseAbs().maxCoeff() == 0.0);
    const auto exp = dispatch_policy(spec(PolicyKind::expected_wind), nc, inst.prices, inst.scenarios);
    CHECK(exp.p_wind == inst.scenarios.forecast);

    const auto dn = evaluate_policy(PolicyKind::no_wind, none, inst.prices, inst.scenarios);
    CHECK(dn.stddev == 0.0);
    CHECK(dn.mean == doctest::Approx(none.generation_cost - none.utility).epsilon(1e-12));
    for (double v : dn.samples) CHECK(v == dn.samples.front());

    // zero noise: no imbalance, the cost is the day-ahead objective
    const auto flat = generate_scenarios(inst.scenarios.forecast, Eigen::MatrixXd::Zero(nc.horizon, nc.num_wind()), 5, 1);
    const auto de = evaluate_policy(PolicyKind::expected_wind, exp, inst.prices, flat);
    CHECK(de.mean == doctest::Approx(exp.objective).epsilon(1e-9));
    CHECK(de.stddev == doctest::Approx(0.0));
}

TEST_CASE("in-sample ordering when cvar tends to the mean") {
    // beta -> 0 turns the risk term into the sample mean of the imbalance
    // cost, so the risk-limiting dispatch minimizes the in-sample evaluated
    // cost over a set containing both pinned policies.
    for (std::uint64_t seed : {3u, 5u, 8u}) {
        const auto inst = random_instance(seed, 30);
        const auto& nc = inst.network;
        const double beta = 1e-9;
        std::vector<double> means;
        for (auto k : {PolicyKind::cvar_risk_limiting, PolicyKind::expected_wind, PolicyKind::no_wind}) {
            const auto d = dispatch_policy(spec(k, beta), nc, inst.prices, inst.scenarios);
            means.push_back(evaluate_policy(k, d, inst.prices, inst.scenarios).mean);
        }
        CHECK(means[0] <= means[1] + 1e-6 * (1 + std::abs(means[1])));
        CHECK(means[0] <= means[2] + 1e-6 * (1 + std::abs(means[2])));
    }
}

TEST_CASE("distribution summaries") {
    const auto inst = random_instance(5, 10);
    DispatchSolution d;
    d.generation_cost = 100.0;
    d.utility = 10.0;
    d.p_wind = inst.scenarios.forecast;
    const auto ev = generate_scenarios(d.p_wind, default_sigma(d.p_wind), 999, 4);
    const auto a = evaluate_policy(PolicyKind::expected_wind, d, inst.prices, ev, 1);
    const auto b = evaluate_policy(PolicyKind::expected_wind, d, inst.prices, ev, 7);
    CHECK(a.samples == b.samples);
    CHECK(a.mean == b.mean);
    CHECK(a.stddev == b.stddev);
    REQUIRE(a.samples.size() == 999);
    for (int s = 0; s < 999; ++s)
        CHECK(a.samples[s] == doctest::Approx(90.0 + transaction_cost(d.p_wind, ev.samples[s], inst.prices)));

    CHECK(a.stddev >= 0.0);
    REQUIRE(a.cdf.size() == 101);
    for (std::size_t i = 1; i < a.cdf.size(); ++i) {
        CHECK(a.cdf[i].cost >= a.cdf[i - 1].cost);
        CHECK(a.cdf[i].probability >= a.cdf[i - 1].probability);
    }
    CHECK(a.cdf.back().probability == 1.0);
    CHECK(a.q25 <= a.q50);
    CHECK(a.q50 <= a.q75);
    CHECK(a.q50 == a.quantile(0.5));
    CHECK(a.cdf_at(a.q50) >= 0.5);

    CostDistribution hand;
    hand.samples = {4, 1, 3, 2};
    CHECK(hand.quantile(0.25) == 1);
    CHECK(hand.quantile(0.5) == 2);
    CHECK(hand.quantile(0.51) == 3);
    CHECK(hand.quantile(1.0) == 4);
    CHECK(hand.cdf_at(2.5) == 0.5);

    // one sample: a single CDF point
    ScenarioSet one = ev;
    one.samples.resize(1);
    const auto c = evaluate_policy(PolicyKind::expected_wind, d, inst.prices, one);
    REQUIRE(c.cdf.size() == 1);
    CHECK(c.cdf[0].probability == 1.0);
    CHECK(c.stddev == 0.0);

    ScenarioSet wrong = ev;
    wrong.forecast = Eigen::MatrixXd::Zero(3, 1);
    CHECK_THROWS_AS(evaluate_policy(PolicyKind::expected_wind, d, inst.prices, wrong), std::invalid_argument);
}

TEST_CASE("mu sweep") {
    const auto inst = random_instance(8, 15);
    const auto& nc = inst.network;
    ClearingConfig cfg;
    const auto base = solve_centralized(nc, inst.prices, inst.scenarios, cfg);
    const auto single = mu_sweep(nc, inst.prices, inst.scenarios, {1.0}, cfg);
    REQUIRE(single.size() == 1);
    CHECK(single[0].ok);
    CHECK(single[0].objective == base.objective);
    CHECK(single[0].generation_cost == base.generation_cost);

    const auto rows = mu_sweep(nc, inst.prices, inst.scenarios, {0.5, 1, 1, 2, 4, 8}, cfg);
    REQUIRE(rows.size() == 6);
    CHECK(rows[1].objective == rows[2].objective);
    CHECK(rows[1].cvar_term == rows[2].cvar_term);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i].ok);
        CHECK(rows[i].cvar_term <= rows[i - 1].cvar_term + 1e-6);
        CHECK(rows[i].generation_cost - rows[i].utility >= rows[i - 1].generation_cost - rows[i - 1].utility - 1e-6);
    }

    CHECK_THROWS_AS(mu_sweep(nc, inst.prices, inst.scenarios, {}, cfg), std::invalid_argument);
    CHECK_THROWS_AS(mu_sweep(nc, inst.prices, inst.scenarios, {2, 1}, cfg), std::invalid_argument);
    CHECK_THROWS_AS(mu_sweep(nc, inst.prices, inst.scenarios, {0, 1}, cfg), std::invalid_argument);
}
