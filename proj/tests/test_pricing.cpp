#include "smc/pricing.hpp"

#include "fixtures.hpp"

#include <doctest.h>

using namespace smc;
using namespace smc::test;

namespace {

// bus 1: cheap unit, bus 2: expensive unit and the load; one line.
NetworkCase two_bus_case(std::optional<double> flow_max) {
    NetworkCase nc;
    nc.horizon = 1;
    nc.buses = {{1, {0.0}}, {2, {10.0}}};
    nc.lines = {{1, 2, 0.1, {}, flow_max}};
    nc.generators = {{1, 0.01, 10.0, 0.0, 50.0, 100.0, 100.0, {}}, {2, 0.01, 30.0, 0.0, 50.0, 100.0, 100.0, {}}};
    return nc;
}

DispatchSolution pinned(const NetworkCase& nc) { return solve_pinned_wind(nc, Eigen::MatrixXd(nc.horizon, 0)); }

}  // namespace

TEST_CASE("one bus price is the marginal cost") {
    const auto d = pinned(one_bus_case());
    const auto tau = extract_lmps(d);
    REQUIRE(tau.rows() == 1);
    REQUIRE(tau.cols() == 1);
    CHECK(tau(0, 0) == doctest::Approx(8.0).epsilon(1e-6));
    CHECK_THROWS_AS(extract_lmps(DispatchSolution{}), std::invalid_argument);
}

TEST_CASE("prices are uniform without congestion and split with it") {
    const auto free = extract_lmps(pinned(two_bus_case(std::nullopt)));
    CHECK(free(0, 0) == doctest::Approx(free(0, 1)).epsilon(1e-6));
    CHECK(free(0, 0) == doctest::Approx(10.2).epsilon(1e-6));  // 10 + 2 * 0.01 * 10

    const auto cong = extract_lmps(pinned(two_bus_case(4.0)));
    CHECK(cong(0, 0) == doctest::Approx(10.08).epsilon(1e-6));  // cheap unit at 4 MW
    CHECK(cong(0, 1) == doctest::Approx(30.12).epsilon(1e-6));  // expensive unit at 6 MW
}

TEST_CASE("price equals the finite-difference cost of extra load") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        auto inst = random_instance(seed, 1, true);
        NetworkCase& nc = inst.network;
        const Eigen::MatrixXd wind = Eigen::MatrixXd::Constant(nc.horizon, nc.num_wind(), 0.3);
        const auto base = solve_pinned_wind(nc, wind);
        const auto tau = extract_lmps(base);
        const double h = 1e-3;
        for (int n = 0; n < nc.num_buses(); ++n) {
            const int t = static_cast<int>(seed % nc.horizon);
            NetworkCase up = nc, dn = nc;
            up.buses[n].base_load[t] += h;
            dn.buses[n].base_load[t] -= h;
            const double fd = (solve_pinned_wind(up, wind).objective - solve_pinned_wind(dn, wind).objective) / (2 * h);
            CHECK(tau(t, n) == doctest::Approx(fd).epsilon(1e-3));
        }
    }
}

TEST_CASE("wind settlement by hand") {
    NetworkCase nc = one_bus_case();
    nc.wind_farms = {{1, {20.0}}};
    DispatchSolution d;
    d.theta = Eigen::MatrixXd::Zero(1, 1);
    d.tau = Eigen::MatrixXd::Constant(1, 1, 20.0);
    d.p_gen = Eigen::MatrixXd::Constant(1, 1, 0.0);
    d.p_dra = Eigen::MatrixXd(1, 0);
    d.p_wind = Eigen::MatrixXd::Constant(1, 1, 10.0);
    const PriceSchedule prices(Eigen::MatrixXd::Constant(1, 1, 30.0), Eigen::MatrixXd::Constant(1, 1, 25.0));
    // shortfall of 2 MW bought back at 30
    auto r = settle(nc, d, d.tau, Eigen::MatrixXd::Constant(1, 1, 8.0), prices);
    CHECK(r.wind[0] == doctest::Approx(140.0));
    // surplus of 4 MW sold at 25
    r = settle(nc, d, d.tau, Eigen::MatrixXd::Constant(1, 1, 14.0), prices);
    CHECK(r.wind[0] == doctest::Approx(300.0));
    r = settle(nc, d, d.tau, Eigen::MatrixXd::Constant(1, 1, 10.0), prices);
    CHECK(r.wind[0] == doctest::Approx(200.0));
}

TEST_CASE("two-settlement payments") {
    const auto inst = random_instance(7, 5, true);
    const auto& nc = inst.network;
    const auto d = solve_centralized(nc, inst.prices, inst.scenarios, ClearingConfig{});
    const Eigen::MatrixXd& w = inst.scenarios.samples[0];

    // real time equal to day ahead: generators get sum tau P
    const auto same = settle(nc, d, d.tau, w, inst.prices);
    for (int i = 0; i < nc.num_generators(); ++i) {
        double expect = 0;
        for (int t = 0; t < nc.horizon; ++t) expect += d.tau(t, nc.generators[i].bus - 1) * d.p_gen(t, i);
        CHECK(same.generator[i] == doctest::Approx(expect).epsilon(1e-12));
    }
    for (int j = 0; j < nc.num_aggregators(); ++j) {
        double expect = 0;
        for (int t = 0; t < nc.horizon; ++t) expect += d.tau(t, nc.aggregators[j].bus - 1) * d.p_dra(t, j);
        CHECK(same.aggregator[j] == doctest::Approx(expect).epsilon(1e-12));
    }

    // deviations settle at the real-time price
    RealTimeQuantities rt{d.p_gen.array() + 1.0, d.p_dra};
    const Eigen::MatrixXd rt_tau = d.tau.array() + 5.0;
    const auto dev = settle(nc, d, rt_tau, w, inst.prices, rt);
    for (int i = 0; i < nc.num_generators(); ++i) {
        double extra = 0;
        for (int t = 0; t < nc.horizon; ++t) extra += rt_tau(t, nc.generators[i].bus - 1);
        CHECK(dev.generator[i] - same.generator[i] == doctest::Approx(extra).epsilon(1e-9));
    }

    // payments scale with prices
    PriceSchedule doubled(2 * inst.prices.purchase, 2 * inst.prices.sell);
    DispatchSolution d2 = d;
    d2.tau *= 2;
    const auto twice = settle(nc, d2, 2 * d.tau, w, doubled);
    CHECK((twice.generator - 2 * same.generator).norm() <= 1e-9 * (1 + same.generator.norm()));
    CHECK((twice.aggregator - 2 * same.aggregator).norm() <= 1e-9 * (1 + same.aggregator.norm()));
    CHECK((twice.wind - 2 * same.wind).norm() <= 1e-9 * (1 + same.wind.norm()));

    // the echo alone reproduces the payments
    const auto again = resettle(dev);
    CHECK(again.generator == dev.generator);
    CHECK(again.aggregator == dev.aggregator);
    CHECK(again.wind == dev.wind);

    CHECK_THROWS_AS(settle(nc, d, Eigen::MatrixXd::Zero(1, 1), w, inst.prices), std::invalid_argument);
}
