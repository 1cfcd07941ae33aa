#include "smc/bundle.hpp"

#include "smc/scenarios.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace smc {

namespace {

// hour-ending 1..24 profiles; other horizons sample them cyclically
constexpr std::array<double, 24> kSystemLoad = {72,  68,  66,  65,  66,  70,  80,  95,  108, 115, 118, 116,
                                                110, 106, 104, 105, 110, 122, 130, 134, 128, 115, 98,  84};
constexpr std::array<double, 24> kPurchasePrice = {22, 21, 20, 20, 20, 21, 24, 30, 34, 37, 38, 36,
                                                   28, 27, 26, 26, 28, 31, 36, 40, 37, 30, 26, 23};

// base-load buses and their shares of the system load
constexpr std::array<int, 4> kLoadBus = {3, 4, 5, 6};
constexpr std::array<double, 4> kLoadShare = {0.2, 0.3, 0.25, 0.25};

double profile(const std::array<double, 24>& p, int slot) { return p[(slot - 1) % 24]; }

}  // namespace

Appliance draw_phev(std::uint64_t seed, std::uint64_t draw, int aggregator, int user, int horizon) {
    constexpr std::array<double, 3> energy_kwh = {10.0, 11.0, 12.0};
    constexpr std::array<double, 3> pmax_kw = {2.1, 2.3, 2.5};
    const auto pick3 = [](double u) { return std::min(2, static_cast<int>(u * 3.0)); };
    Appliance a;
    a.aggregator = aggregator;
    a.user = user;
    a.id = 1;
    a.energy_total = energy_kwh[pick3(counter_uniform(seed, 3 * draw))] / 1000.0;
    a.p_max = pmax_kw[pick3(counter_uniform(seed, 3 * draw + 1))] / 1000.0;
    a.p_min = 0.0;
    a.t_start = 1;
    a.t_end = std::min(horizon, counter_uniform(seed, 3 * draw + 2) < 0.7 ? 6 : 7);
    return a;
}

NetworkCase make_wecc6_case(const BundleOptions& opt) {
    NetworkCase nc;
    nc.horizon = opt.horizon;
    nc.mva_base = 100.0;
    for (int id = 1; id <= 6; ++id) nc.buses.push_back({id, std::vector<double>(opt.horizon, 0.0)});
    for (std::size_t k = 0; k < kLoadBus.size(); ++k)
        for (int t = 1; t <= opt.horizon; ++t)
            nc.buses[kLoadBus[k] - 1].base_load[t - 1] = kLoadShare[k] * profile(kSystemLoad, t);

    nc.lines = {{1, 6, 0.2, {}, {}}, {6, 2, 0.3, {}, {}}, {2, 5, 0.25, {}, {}},
                {5, 3, 0.1, {}, {}}, {3, 4, 0.3, {}, {}}, {4, 1, 0.4, {}, {}}};

    nc.generators = {
        {1, 0.3, 50.0, 10.0, 90.0, 50.0, 50.0, {}},
        {2, 0.15, 30.0, 5.0, 50.0, 35.0, 40.0, {}},
        {3, 0.2, 40.0, 8.0, 60.0, 40.0, 40.0, {}},
    };

    for (int bus : {1, 2, 5}) nc.wind_farms.push_back({bus, std::vector<double>(opt.horizon, opt.wind_rating_mw)});

    std::uint64_t draw = 0;
    int aggregator_index = 0;
    for (int bus : {4, 4, 5, 6}) {
        Aggregator agg;
        agg.bus = bus;
        agg.p_dra_max = opt.p_dra_max;
        ++aggregator_index;
        for (int user = 1; user <= opt.users_per_aggregator; ++user)
            agg.appliances.push_back(draw_phev(opt.appliance_seed, draw++, aggregator_index, user, opt.horizon));
        nc.aggregators.push_back(std::move(agg));
    }
    return nc;
}

PriceSchedule make_wecc6_prices(const BundleOptions& opt) {
    // farms 1 and 2 buy cheaper in the early afternoon
    Eigen::MatrixXd b(opt.horizon, 3);
    for (int t = 1; t <= opt.horizon; ++t) {
        const int hour = (t - 1) % 24 + 1;
        const double base = profile(kPurchasePrice, t);
        const double afternoon = (hour == 13 || hour == 14) ? 0.85 : 1.0;
        b(t - 1, 0) = 0.97 * base * afternoon;
        b(t - 1, 1) = 1.00 * base * afternoon;
        b(t - 1, 2) = 1.03 * base;
    }
    return PriceSchedule(b, opt.sell_ratio * b);
}

Eigen::MatrixXd make_wecc6_forecast(const BundleOptions& opt) {
    constexpr std::array<double, 3> level = {10.0, 9.0, 11.0};
    constexpr std::array<double, 3> swing = {4.0, 5.0, 3.0};
    constexpr std::array<double, 3> windiest_hour = {3.0, 5.0, 23.0};
    Eigen::MatrixXd f(opt.horizon, 3);
    for (int t = 1; t <= opt.horizon; ++t)
        for (int m = 0; m < 3; ++m) {
            const double phase = 2.0 * std::numbers::pi * (t - windiest_hour[m]) / 24.0;
            const double value = level[m] + swing[m] * std::cos(phase);
            f(t - 1, m) = std::clamp(value, 1.0, opt.wind_rating_mw - 1.0) * opt.wind_rating_mw / 20.0;
        }
    return f;
}

}  // namespace smc
