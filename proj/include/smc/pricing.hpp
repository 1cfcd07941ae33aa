#pragma once

// Locational prices from the clearing duals and two-settlement payments.

#include "smc/clearing.hpp"

#include <optional>

namespace smc {

/// Nodal prices tau (T x N_b, $/MWh): the marginal cost of one more MW of
/// load at a bus in a slot. Throws std::invalid_argument when the solution
/// carries no prices.
Eigen::MatrixXd extract_lmps(const DispatchSolution& solution);

// Real-time quantities for generators and aggregators; the day-ahead
// schedule when not given.
struct RealTimeQuantities {
    Eigen::MatrixXd p_gen;  // T x N_g
    Eigen::MatrixXd p_dra;  // T x N_a
};

struct SettlementReport {
    Eigen::VectorXd generator;   // revenue per generator, $
    Eigen::VectorXd aggregator;  // payment per aggregator, $
    Eigen::VectorXd wind;        // revenue per wind farm, $

    // inputs, echoed so the payments can be recomputed from the report alone
    std::vector<int> generator_bus, aggregator_bus, wind_bus;  // 1-based
    Eigen::MatrixXd da_tau, rt_tau;                            // T x N_b
    Eigen::MatrixXd da_p_gen, rt_p_gen;                        // T x N_g
    Eigen::MatrixXd da_p_dra, rt_p_dra;                        // T x N_a
    Eigen::MatrixXd da_p_wind, realized_wind;                  // T x N_w
    Eigen::MatrixXd purchase, sell;                            // T x N_w
};

/// Generators:   sum_t tau_DA P_DA + tau_RT (P_RT - P_DA)
/// Aggregators:  same form, as a payment
/// Wind farms:   sum_t tau_DA p_DA + s [w - p_DA]^+ - b [p_DA - w]^+
SettlementReport settle(const NetworkCase& network, const DispatchSolution& solution, const Eigen::MatrixXd& rt_tau,
                        const Eigen::MatrixXd& realized_wind, const PriceSchedule& prices,
                        const std::optional<RealTimeQuantities>& rt = std::nullopt);

/// Payments recomputed from the echoed inputs of a report.
SettlementReport resettle(const SettlementReport& report);

}  // namespace smc
