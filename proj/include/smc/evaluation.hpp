#pragma once

// Monte Carlo comparison of wind commitment policies.

#include "smc/clearing.hpp"

#include <string>
#include <vector>

namespace smc {

enum class PolicyKind { cvar_risk_limiting, expected_wind, no_wind };

std::string to_string(PolicyKind kind);
/// Accepts the to_string spellings and the short forms "cvar", "expected", "none".
PolicyKind parse_policy(const std::string& name);

struct PolicySpec {
    PolicyKind kind = PolicyKind::cvar_risk_limiting;
    ClearingConfig config;  // only the risk-limiting policy clears with risk terms
};

/// Day-ahead dispatch of a policy:
///   cvar_risk_limiting  clear_market on the SAA scenarios
///   expected_wind       p_W pinned to the forecast (clipped to the commitment cap)
///   no_wind             p_W pinned to zero
DispatchSolution dispatch_policy(const PolicySpec& policy, const NetworkCase& network, const PriceSchedule& prices,
                                 const ScenarioSet& scenarios);

struct CdfPoint {
    double cost = 0.0;
    double probability = 0.0;
};

struct CostDistribution {
    PolicyKind policy = PolicyKind::cvar_risk_limiting;
    std::vector<double> samples;  // in scenario order, $
    double generation_cost = 0.0;
    double utility = 0.0;
    double mean = 0.0;
    double stddev = 0.0;  // population
    double q25 = 0.0, q50 = 0.0, q75 = 0.0;
    std::vector<CdfPoint> cdf;

    /// Smallest sample with empirical CDF >= q.
    double quantile(double q) const;
    /// Fraction of samples <= cost.
    double cdf_at(double cost) const;
};

/// Per-sample cost: generation cost - utility of the fixed dispatch plus the
/// realized imbalance cost of its wind commitment. The no_wind policy takes
/// no part in the wind market, so its imbalance cost is zero by definition.
/// The CDF is tabulated at `cdf_points` evenly spaced costs from min to max.
CostDistribution evaluate_policy(PolicyKind policy, const DispatchSolution& dispatch, const PriceSchedule& prices,
                                 const ScenarioSet& eval_scenarios, int threads = 1, int cdf_points = 101);

struct MuSweepRow {
    double mu = 0.0;
    bool ok = false;
    std::string status;  // solver status, or the error text on failure
    double generation_cost = 0.0;
    double cvar_term = 0.0;  // eta + sum u / (N_s (1 - beta)), $
    double utility = 0.0;
    double objective = 0.0;
    double wind_committed = 0.0;  // sum of p_W, MWh
    int iterations = 0;
};

/// One clearing per grid point with config.risk.mu replaced. Failures are
/// recorded in the row rather than thrown. Throws std::invalid_argument when
/// the grid is empty, non-positive or not ascending.
std::vector<MuSweepRow> mu_sweep(const NetworkCase& network, const PriceSchedule& prices, const ScenarioSet& scenarios,
                                 const std::vector<double>& mu_grid, const ClearingConfig& config);

}  // namespace smc
