#pragma once

// Stochastic day-ahead market clearing: the smooth sample-average program
// solved in one piece, and its ADMM decomposition between the ISO and the
// demand-response aggregators.
//
// Price sign convention: `tau` and `lambda` in DispatchSolution are prices,
// i.e. the marginal cost of serving one more MW at a bus (or aggregator) in
// a slot. The raw equality multipliers of the assembled programs, and the
// ADMM multiplier updated by dual_update(), carry the opposite sign.

#include "smc/grid.hpp"
#include "smc/qp.hpp"
#include "smc/risk.hpp"
#include "smc/scenarios.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace smc {

enum class ClearingMode { central, admm };

struct ClearingConfig {
    RiskConfig risk;
    double rho = 35.0;
    double eps_pri = 1e-4;
    int max_admm_iter = 200;
    ClearingMode mode = ClearingMode::central;
    QpSettings qp;
    int threads = 1;

    void validate() const;
};

struct TraceRow {
    int iteration = 0;
    double objective = 0.0;        // $
    double primal_residual = 0.0;  // MW
    double dual_residual = 0.0;    // diagnostic only
    double wall_ms = 0.0;
};

struct DispatchSolution {
    Eigen::MatrixXd p_gen;   // T x N_g
    Eigen::MatrixXd p_wind;  // T x N_w
    Eigen::MatrixXd p_dra;   // T x N_a
    Eigen::MatrixXd theta;   // T x N_b, rad
    // [aggregator][appliance][slot]
    std::vector<std::vector<std::vector<double>>> appliance;
    double eta = 0.0;
    Eigen::VectorXd u;
    Eigen::MatrixXd lambda;  // T x N_a, $/MWh
    Eigen::MatrixXd tau;     // T x N_b, $/MWh

    double generation_cost = 0.0;
    double utility = 0.0;
    double cvar_term = 0.0;  // eta + sum u / (N_s (1 - beta)); 0 without risk terms
    double objective = 0.0;  // generation_cost - utility + mu * cvar_term

    bool converged = false;
    std::string status;
    int iterations = 0;
    KktResiduals kkt;  // centralized solve, or the final ISO subproblem
    std::vector<TraceRow> trace;
};

class ClearingError : public std::runtime_error {
public:
    ClearingError(const std::string& what, QpStatus status, int iteration = -1)
        : std::runtime_error(what), status_(status), iteration_(iteration) {}
    QpStatus status() const { return status_; }
    int iteration() const { return iteration_; }

private:
    QpStatus status_;
    int iteration_;
};

// Raised before assembly when s > b somewhere; lists the offending entries.
class ConvexityError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Throws ConvexityError naming each (farm, slot) with s > b.
void require_convexity(const PriceSchedule& prices);

// Variable and row positions of an assembled clearing program.
struct ClearingLayout {
    int horizon = 0;
    std::vector<int> p_gen, p_wind, p_dra, theta;  // [t * N + i]
    std::vector<std::vector<std::vector<int>>> appliance;  // [j][k][t], -1 outside the window
    int eta = -1;
    std::vector<int> u;
    int num_epigraph = 0;
    std::vector<int> balance_rows;     // equality rows, [t * N_b + n]
    std::vector<int> aggregator_rows;  // equality rows, [t * N_a + j]
};

struct AssembledProgram {
    QuadraticProgram qp;
    ClearingLayout layout;
};

/// Number of variables of the centralized program:
///   T (N_g + N_w + N_a + N_b) + sum_appliances span + 1 + N_s + N_s * #{(t, m): varpi > 0}.
int centralized_variable_count(const NetworkCase& network, const PriceSchedule& prices, int num_scenarios);

/// Assembles the smooth SAA program with epigraph auxiliaries replacing
/// |p_W - w_s|. Throws ConvexityError if s > b anywhere.
AssembledProgram assemble_centralized(const NetworkCase& network, const PriceSchedule& prices,
                                      const ScenarioSet& scenarios, const RiskConfig& risk);

DispatchSolution solve_centralized(const NetworkCase& network, const PriceSchedule& prices,
                                   const ScenarioSet& scenarios, const ClearingConfig& config);

/// Risk-neutral dispatch with the wind injection fixed to `wind` (T x N_w):
/// no CVaR variables, no transaction-cost terms.
DispatchSolution solve_pinned_wind(const NetworkCase& network, const Eigen::MatrixXd& wind,
                                   const QpSettings& settings = {});

// ---------------------------------------------------------------------------
// ADMM decomposition

// The only data that crosses the ISO / aggregator boundary.
struct IsoToAggregator {
    int aggregator = 0;
    std::vector<double> lambda;  // ADMM multiplier, per slot
    std::vector<double> target;  // P_DRA per slot, MW
};

struct AggregatorToIso {
    int aggregator = 0;
    std::vector<double> consumption;  // sum of appliance schedules per slot, MW
};

// Network data visible to the ISO: aggregators carry bus and limit only.
struct IsoView {
    NetworkCase network;

    explicit IsoView(const NetworkCase& full);
};

struct IsoUpdate {
    Eigen::MatrixXd p_gen, p_wind, p_dra, theta, tau;
    double eta = 0.0;
    Eigen::VectorXd u;
    double generation_cost = 0.0;
    double cvar_term = 0.0;
    KktResiduals kkt;
};

/// ISO step: minimizes generation cost + mu * CVaR surrogate
///   + sum lambda P_DRA + rho/2 sum (P_DRA - consumption)^2
/// over the network constraints. `lambda` and `consumption` are T x N_a.
IsoUpdate iso_subproblem(const IsoView& iso, const PriceSchedule& prices, const ScenarioSet& scenarios,
                         const ClearingConfig& config, const Eigen::MatrixXd& lambda,
                         const Eigen::MatrixXd& consumption);

struct AggregatorUpdate {
    std::vector<std::vector<double>> schedules;  // [appliance][slot]
    std::vector<double> consumption;             // per slot
    double utility = 0.0;
};

/// Aggregator step: minimizes
///   -sum_t lambda_t q_t - sum U + rho/2 sum_t (q_t - target_t)^2,  q_t = sum p_t,
/// over its appliances' feasible sets.
AggregatorUpdate aggregator_subproblem(const Aggregator& aggregator, int horizon, double rho,
                                       const std::vector<double>& lambda, const std::vector<double>& target,
                                       const QpSettings& settings = {});

/// lambda + rho (P_DRA - consumption), elementwise.
Eigen::MatrixXd dual_update(const Eigen::MatrixXd& lambda, const Eigen::MatrixXd& p_dra,
                            const Eigen::MatrixXd& consumption, double rho);

/// Frobenius norm of P_DRA - consumption.
double primal_residual(const Eigen::MatrixXd& p_dra, const Eigen::MatrixXd& consumption);

// Aggregator-side state: owns its appliances and answers ISO messages.
class AggregatorAgent {
public:
    AggregatorAgent(int index, Aggregator data, int horizon, double rho, QpSettings settings);

    AggregatorToIso respond(const IsoToAggregator& message);

    int index() const { return index_; }
    const std::vector<std::vector<double>>& schedules() const { return last_.schedules; }
    double utility() const { return last_.utility; }

private:
    int index_;
    Aggregator data_;
    int horizon_;
    double rho_;
    QpSettings settings_;
    AggregatorUpdate last_;
};

// Transport between the coordinator and the aggregators.
class AggregatorChannel {
public:
    virtual ~AggregatorChannel() = default;
    virtual std::vector<AggregatorToIso> exchange(const std::vector<IsoToAggregator>& messages) = 0;
};

// Delivers messages to in-process agents, solving them concurrently.
class InProcessChannel : public AggregatorChannel {
public:
    InProcessChannel(std::vector<AggregatorAgent>& agents, int threads) : agents_(agents), threads_(threads) {}
    std::vector<AggregatorToIso> exchange(const std::vector<IsoToAggregator>& messages) override;

private:
    std::vector<AggregatorAgent>& agents_;
    int threads_;
};

/// ISO coordinator loop: ISO update, aggregator updates through `channel`,
/// dual update, until the primal residual drops to eps_pri. The multiplier
/// starts at `initial_lambda` (zeros when empty) and the aggregate
/// consumption at zero.
struct AdmmResult {
    IsoUpdate iso;
    Eigen::MatrixXd lambda;       // ADMM multiplier (negative price)
    Eigen::MatrixXd consumption;  // last aggregator report
    std::vector<TraceRow> trace;
    bool converged = false;
    int iterations = 0;
};

AdmmResult run_admm(const IsoView& iso, const PriceSchedule& prices, const ScenarioSet& scenarios,
                    const ClearingConfig& config, AggregatorChannel& channel,
                    const std::function<double()>& utility_probe = {}, Eigen::MatrixXd initial_lambda = {});

/// Full distributed clearing with in-process aggregators. When the iteration
/// cap is hit, the last iterate is returned with converged = false.
DispatchSolution admm_solve(const NetworkCase& network, const PriceSchedule& prices, const ScenarioSet& scenarios,
                            const ClearingConfig& config);

/// Dispatches to solve_centralized or admm_solve by config.mode.
DispatchSolution clear_market(const NetworkCase& network, const PriceSchedule& prices, const ScenarioSet& scenarios,
                              const ClearingConfig& config);

}  // namespace smc
