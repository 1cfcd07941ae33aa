#pragma once

// Real-time imbalance cost of the committed wind schedule and its CVaR.

#include "smc/scenarios.hpp"

#include <Eigen/Dense>

#include <span>
#include <utility>

namespace smc {

// Real-time purchase (b) and sell (s) prices per slot and wind bus, $/MWh.
struct PriceSchedule {
    Eigen::MatrixXd purchase;  // T x N_w
    Eigen::MatrixXd sell;      // T x N_w

    PriceSchedule() = default;
    PriceSchedule(Eigen::MatrixXd b, Eigen::MatrixXd s);

    // (b - s) / 2
    Eigen::MatrixXd half_spread() const { return 0.5 * (purchase - sell); }
    // (b + s) / 2
    Eigen::MatrixXd midpoint() const { return 0.5 * (purchase + sell); }
    bool convexity_ok() const;

    int horizon() const { return static_cast<int>(purchase.rows()); }
    int num_wind() const { return static_cast<int>(purchase.cols()); }
};

struct RiskConfig {
    double beta = 0.95;
    double mu = 1.0;

    /// Throws std::invalid_argument unless 0 < beta < 1 and mu > 0.
    void validate() const;
};

/// Grid-wide net transaction cost
///   sum_t  varpi_t . |p_W - w| + vartheta_t . (p_W - w),
/// i.e. shortfall bought at b minus surplus sold at s.
double transaction_cost(const Eigen::MatrixXd& p_wind, const Eigen::MatrixXd& realized, const PriceSchedule& prices);

/// Same quantity from the hinge form  b [p_W - w]^+ - s [w - p_W]^+.
double transaction_cost_hinge(const Eigen::MatrixXd& p_wind, const Eigen::MatrixXd& realized,
                              const PriceSchedule& prices);

/// Sample-average CVaR objective
///   eta + 1/(N_s (1 - beta)) sum_s [T(p_W, w_s) - eta]^+.
double saa_cvar_value(const Eigen::MatrixXd& p_wind, double eta, const ScenarioSet& scenarios,
                      const PriceSchedule& prices, double beta);

/// Same objective for precomputed scenario losses.
double saa_cvar_value(std::span<const double> losses, double eta, double beta);

struct VarCvar {
    double var = 0.0;
    double cvar = 0.0;
};

/// Empirical VaR (smallest sample with empirical CDF >= beta) and CVaR
/// (minimum of the sample-average objective over eta, attained at a sample).
VarCvar empirical_var_cvar(std::span<const double> losses, double beta);

/// True iff s <= b everywhere (equivalently varpi >= 0).
bool check_convexity_condition(const PriceSchedule& prices);

}  // namespace smc
