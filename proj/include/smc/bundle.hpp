#pragma once

// The shipped example instance: a 6-bus ring modeled on the WECC test
// system with three thermal units, three 20 MW wind farms, and four
// demand-response aggregators serving PHEV owners.

#include "smc/grid.hpp"
#include "smc/risk.hpp"

#include <cstdint>

namespace smc {

struct BundleOptions {
    int horizon = 24;
    int users_per_aggregator = 200;
    std::uint64_t appliance_seed = 2014;
    double wind_rating_mw = 20.0;
    double p_dra_max = 50.0;
    double sell_ratio = 0.9;  // s = sell_ratio * b
};

/// Network, generators, wind farms, and randomized PHEV fleets.
///   energy:  uniform on {10, 11, 12} kWh
///   p_max:   uniform on {2.1, 2.3, 2.5} kW,  p_min = 0
///   window:  slot 1 (hour ending 1am) to slot 6 w.p. 0.7, else slot 7
NetworkCase make_wecc6_case(const BundleOptions& options = {});

/// Purchase prices with a morning (7am-12pm) and an evening (6pm-9pm) peak;
/// sell prices are `sell_ratio` times purchase.
PriceSchedule make_wecc6_prices(const BundleOptions& options = {});

/// Synthetic diurnal day-ahead wind forecast, T x 3, MW.
Eigen::MatrixXd make_wecc6_forecast(const BundleOptions& options = {});

/// A single PHEV drawn from the table above; `draw` indexes the random stream.
Appliance draw_phev(std::uint64_t seed, std::uint64_t draw, int aggregator, int user, int horizon);

}  // namespace smc
