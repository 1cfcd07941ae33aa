#include "smc/risk.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>
#include <random>

using namespace smc;

namespace {

PriceSchedule scalar_prices(double b, double s) {
    return PriceSchedule(Eigen::MatrixXd::Constant(1, 1, b), Eigen::MatrixXd::Constant(1, 1, s));
}

Eigen::MatrixXd scalar(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

// min over eta of eta + sum [x - eta]^+ / (N (1 - beta)), scanning every sample
double brute_cvar(const std::vector<double>& x, double beta) {
    double best = std::numeric_limits<double>::infinity();
    for (double eta : x) {
        double tail = 0.0;
        for (double v : x) tail += std::max(v - eta, 0.0);
        best = std::min(best, eta + tail / (x.size() * (1.0 - beta)));
    }
    return best;
}

}  // namespace

TEST_CASE("transaction cost by hand") {
    const auto p = scalar_prices(10, 8);
    CHECK(transaction_cost(scalar(3), scalar(3), p) == 0.0);
    CHECK(transaction_cost(scalar(5), scalar(3), p) == doctest::Approx(20.0));
    CHECK(transaction_cost_hinge(scalar(5), scalar(3), p) == doctest::Approx(20.0));
    CHECK(transaction_cost(scalar(3), scalar(5), p) == doctest::Approx(-16.0));
    CHECK(transaction_cost_hinge(scalar(3), scalar(5), p) == doctest::Approx(-16.0));
    CHECK_THROWS_AS(transaction_cost(Eigen::MatrixXd::Zero(2, 1), scalar(1), p), std::invalid_argument);
}

TEST_CASE("saa objective by hand") {
    // one slot, b = s = 1: scenario cost is p - w
    const auto prices = scalar_prices(1, 1);
    ScenarioSet sc;
    sc.forecast = scalar(0);
    sc.samples = {scalar(10), scalar(0)};
    // p = 10: costs {0, 10}
    CHECK(saa_cvar_value(scalar(10), 0.0, sc, prices, 0.5) == doctest::Approx(10.0));
    CHECK(saa_cvar_value(scalar(10), 12.0, sc, prices, 0.5) == doctest::Approx(12.0));
    const std::vector<double> one = {4.0};
    CHECK(saa_cvar_value(one, 0.0, 0.5) == doctest::Approx(8.0));
    ScenarioSet empty;
    empty.forecast = scalar(0);
    CHECK_THROWS(saa_cvar_value(scalar(1), 0.0, empty, prices, 0.5));
}

TEST_CASE("empirical var and cvar") {
    std::vector<double> x = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    auto r = empirical_var_cvar(x, 0.9);
    CHECK(r.var == 9.0);
    CHECK(r.cvar == doctest::Approx(10.0));
    r = empirical_var_cvar(std::vector<double>(7, 3.5), 0.3);
    CHECK(r.var == 3.5);
    CHECK(r.cvar == doctest::Approx(3.5));
    r = empirical_var_cvar(std::vector<double>{0, 0, 0, 100}, 0.75);
    CHECK(r.var == 0.0);
    CHECK(r.cvar == doctest::Approx(100.0));
}

TEST_CASE("cvar agrees with brute force and the tail mean") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = std::uniform_int_distribution<int>(1, 60)(rng);
        const double beta = std::uniform_real_distribution<double>(0.05, 0.99)(rng);
        std::vector<double> x(n);
        // integer-valued draws force ties
        for (auto& v : x) v = std::uniform_int_distribution<int>(-20, 20)(rng) * 0.5;
        const auto r = empirical_var_cvar(x, beta);
        CHECK(r.cvar >= r.var - 1e-12);
        CHECK(std::abs(r.cvar - brute_cvar(x, beta)) <= 1e-12 * (1 + std::abs(r.cvar)));
    }
    // (1 - beta) N integral: CVaR is the mean of the top (1 - beta) N samples
    std::vector<double> x(40);
    for (auto& v : x) v = std::normal_distribution<double>()(rng);
    auto sorted = x;
    std::sort(sorted.rbegin(), sorted.rend());
    const double tail = (sorted[0] + sorted[1] + sorted[2] + sorted[3]) / 4.0;
    CHECK(empirical_var_cvar(x, 0.9).cvar == doctest::Approx(tail).epsilon(1e-12));
}

TEST_CASE("objective is convex in eta along a scan") {
    std::mt19937_64 rng(5);
    std::vector<double> x(25);
    for (auto& v : x) v = std::normal_distribution<double>(3, 2)(rng);
    std::vector<double> f;
    for (double eta = -5; eta <= 12; eta += 0.05) f.push_back(saa_cvar_value(x, eta, 0.8));
    for (std::size_t k = 1; k + 1 < f.size(); ++k) CHECK(f[k] <= 0.5 * (f[k - 1] + f[k + 1]) + 1e-9);
}

TEST_CASE("convexity condition") {
    Eigen::MatrixXd b = Eigen::MatrixXd::Constant(3, 2, 20.0);
    CHECK(check_convexity_condition(PriceSchedule(b, 0.9 * b)));
    CHECK(check_convexity_condition(PriceSchedule(b, b)));
    Eigen::MatrixXd s = 0.9 * b;
    s(2, 1) = 21.0;
    CHECK_FALSE(check_convexity_condition(PriceSchedule(b, s)));
    CHECK_THROWS_AS(PriceSchedule(b, -s), std::invalid_argument);
    CHECK_THROWS_AS(PriceSchedule(b, Eigen::MatrixXd::Zero(2, 2)), std::invalid_argument);
}

TEST_CASE("risk config domain") {
    CHECK_NOTHROW(RiskConfig{0.95, 1.0}.validate());
    CHECK_THROWS_AS((RiskConfig{1.2, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((RiskConfig{0.0, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((RiskConfig{0.5, 0.0}.validate()), std::invalid_argument);
}
