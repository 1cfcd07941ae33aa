#pragma once

// Small hand-built and randomized instances shared by the test binaries.

#include "smc/bundle.hpp"
#include "smc/clearing.hpp"

#include <random>

namespace smc::test {

// 1 bus, 1 generator with C(p) = p^2, fixed load 4 MW, one slot.
inline NetworkCase one_bus_case(double load = 4.0) {
    NetworkCase nc;
    nc.horizon = 1;
    nc.buses = {{1, {load}}};
    nc.generators = {{1, 1.0, 0.0, 0.0, 10.0, 100.0, 100.0, {}}};
    return nc;
}

inline PriceSchedule empty_prices(int horizon) {
    return PriceSchedule(Eigen::MatrixXd(horizon, 0), Eigen::MatrixXd(horizon, 0));
}

inline ScenarioSet empty_scenarios(int horizon, int n = 1) {
    return generate_scenarios(Eigen::MatrixXd(horizon, 0), Eigen::MatrixXd(horizon, 0), n, 1);
}

struct RandomInstance {
    NetworkCase network;
    PriceSchedule prices;
    ScenarioSet scenarios;
};

// 2-6 buses on a ring plus chords, 1-3 aggregators, 1-2 wind farms, T = 4.
// With strongly_convex every cost and utility is strictly convex/concave.
inline RandomInstance random_instance(std::uint64_t seed, int num_samples = 10, bool strongly_convex = false) {
    std::mt19937_64 rng(seed);
    auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
    auto pick = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); };
    RandomInstance r;
    NetworkCase& nc = r.network;
    const int T = 4;
    nc.horizon = T;
    const int nb = pick(2, 6);
    for (int n = 1; n <= nb; ++n) {
        std::vector<double> load(T);
        for (auto& l : load) l = uni(0.0, 8.0);
        nc.buses.push_back({n, load});
    }
    for (int n = 1; n < nb; ++n) nc.lines.push_back({n, n + 1, uni(0.1, 0.4), {}, {}});
    if (nb > 2) nc.lines.push_back({nb, 1, uni(0.1, 0.4), {}, {}});
    const int ng = pick(1, 3);
    for (int i = 0; i < ng; ++i)
        nc.generators.push_back({pick(1, nb), strongly_convex ? uni(0.05, 0.3) : (i == 0 ? uni(0.05, 0.3) : 0.0),
                                 uni(20.0, 45.0), 0.0, 80.0, uni(30.0, 80.0), uni(30.0, 80.0), {}});
    const int nw = pick(1, 2);
    for (int m = 0; m < nw; ++m) nc.wind_farms.push_back({pick(1, nb), std::vector<double>(T, 10.0)});
    const int na = pick(1, 3);
    for (int j = 0; j < na; ++j) {
        Aggregator agg;
        agg.bus = pick(1, nb);
        agg.p_dra_max = 30.0;
        const int users = pick(1, 4);
        for (int k = 0; k < users; ++k) {
            Appliance ap;
            ap.aggregator = j + 1;
            ap.user = k + 1;
            ap.id = 1;
            ap.t_start = pick(1, T);
            ap.t_end = pick(ap.t_start, T);
            ap.p_min = 0.0;
            ap.p_max = uni(1.0, 4.0);
            ap.energy_total = uni(0.2, 0.9) * ap.p_max * ap.span();
            if (strongly_convex || pick(0, 1)) {
                ap.utility_gamma.assign(T, 0.0);
                ap.utility_delta.assign(T, 0.0);
                for (int t = 0; t < T; ++t) {
                    ap.utility_gamma[t] = uni(0.5, 3.0);
                    ap.utility_delta[t] = uni(5.0, 40.0);
                }
            }
            agg.appliances.push_back(ap);
        }
        nc.aggregators.push_back(std::move(agg));
    }
    Eigen::MatrixXd b(T, nw), forecast(T, nw);
    for (int t = 0; t < T; ++t)
        for (int m = 0; m < nw; ++m) {
            b(t, m) = uni(10.0, 40.0);
            forecast(t, m) = uni(2.0, 8.0);
        }
    Eigen::MatrixXd s = b;
    for (int t = 0; t < T; ++t)
        for (int m = 0; m < nw; ++m) s(t, m) *= uni(0.5, 1.0);
    r.prices = PriceSchedule(b, s);
    r.scenarios = generate_scenarios(forecast, default_sigma(forecast), num_samples, seed + 17);
    return r;
}

}  // namespace smc::test

namespace smc::test {

// Deterministic dispatch written independently of the library assembly:
// single system balance per slot (valid without line limits on a connected
// grid), appliance rows summed directly, wind charged cost(t, m) per MW
// above `reference`. Returns the optimal objective.
inline double copper_plate_dispatch(const NetworkCase& nc, const Eigen::MatrixXd& wind_cost,
                                    const Eigen::MatrixXd& reference) {
    const int T = nc.horizon;
    QpBuilder b;
    std::vector<QpBuilder::Row> balance(T);
    double rhs_shift = 0.0;
    std::vector<std::vector<int>> gen(nc.num_generators(), std::vector<int>(T));
    for (int i = 0; i < nc.num_generators(); ++i) {
        const auto& g = nc.generators[i];
        for (int t = 0; t < T; ++t) {
            const int v = b.add_variable("g", g.cost_b);
            b.add_quadratic(v, v, 2 * g.cost_a);
            b.add_inequality(QpBuilder::Row{}.add(v, 1), g.p_max);
            b.add_inequality(QpBuilder::Row{}.add(v, -1), -g.p_min);
            balance[t].add(v, 1);
            gen[i][t] = v;
        }
        for (int t = 0; t < T; ++t) {
            if (t == 0) {
                b.add_inequality(QpBuilder::Row{}.add(gen[i][0], 1), g.initial_output() + g.ramp_up);
                b.add_inequality(QpBuilder::Row{}.add(gen[i][0], -1), g.ramp_down - g.initial_output());
            } else {
                b.add_inequality(QpBuilder::Row{}.add(gen[i][t], 1).add(gen[i][t - 1], -1), g.ramp_up);
                b.add_inequality(QpBuilder::Row{}.add(gen[i][t - 1], 1).add(gen[i][t], -1), g.ramp_down);
            }
        }
    }
    for (int m = 0; m < nc.num_wind(); ++m)
        for (int t = 0; t < T; ++t) {
            const int v = b.add_variable("w", wind_cost(t, m));
            rhs_shift -= wind_cost(t, m) * reference(t, m);
            b.add_inequality(QpBuilder::Row{}.add(v, 1), nc.wind_farms[m].p_commit_max[t]);
            b.add_inequality(QpBuilder::Row{}.add(v, -1), 0.0);
            balance[t].add(v, 1);
        }
    for (const auto& agg : nc.aggregators) {
        std::vector<QpBuilder::Row> total(T);
        for (const auto& ap : agg.appliances) {
            QpBuilder::Row energy;
            for (int t = ap.t_start; t <= ap.t_end; ++t) {
                const int v = b.add_variable("p", -ap.delta(t));
                if (ap.gamma(t) > 0) b.add_quadratic(v, v, ap.gamma(t));
                b.add_inequality(QpBuilder::Row{}.add(v, 1), ap.p_max);
                b.add_inequality(QpBuilder::Row{}.add(v, -1), -ap.p_min);
                energy.add(v, 1);
                balance[t - 1].add(v, -1);
                total[t - 1].add(v, 1);
            }
            b.add_equality(energy, ap.energy_total);
        }
        for (int t = 0; t < T; ++t)
            if (!total[t].cols.empty()) b.add_inequality(total[t], agg.p_dra_max);
    }
    const Eigen::MatrixXd load = nc.base_load();
    for (int t = 0; t < T; ++t) b.add_equality(balance[t], load.row(t).sum());
    b.add_offset(rhs_shift);
    const auto sol = solve_qp(b.build());
    if (sol.status != QpStatus::optimal) throw std::runtime_error("oracle dispatch failed");
    return sol.objective;
}

}  // namespace smc::test
