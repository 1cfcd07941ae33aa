#pragma once

// Shared building blocks of the clearing programs (internal).

#include "smc/clearing.hpp"

namespace smc::detail {

struct NetworkBlockOptions {
    // with scenarios: CVaR variables and rows
    const PriceSchedule* prices = nullptr;
    const ScenarioSet* scenarios = nullptr;
    const RiskConfig* risk = nullptr;
    // fixed wind injection instead of p_W variables
    const Eigen::MatrixXd* pinned_wind = nullptr;
    // P_DRA >= 0 follows from the appliance rows when they are present; the
    // explicit row would make the active set degenerate in idle slots
    bool dra_floor = true;
};

/// Generators, wind, aggregator totals, angles, network rows, and optionally
/// the sample-average CVaR epigraph.
ClearingLayout add_network_block(QpBuilder& builder, const NetworkCase& network, const FlowMatrices& flows,
                                 const NetworkBlockOptions& options);

/// Appliance variables and the aggregator balance P_DRA = sum p.
void add_appliance_block(QpBuilder& builder, const NetworkCase& network, ClearingLayout& layout);

Eigen::MatrixXd gather(const Eigen::VectorXd& x, const std::vector<int>& index, int rows, int cols);

double generation_cost(const NetworkCase& network, const Eigen::MatrixXd& p_gen);

double cvar_term(const ClearingLayout& layout, const Eigen::VectorXd& x, int num_scenarios, double beta);

}  // namespace smc::detail
