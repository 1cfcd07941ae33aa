#pragma once

// Static network instance for day-ahead clearing on a lossless DC grid.
//
// Units: powers in MW, energies in MWh, reactances in p.u. on `mva_base`,
// costs in $. Slots and bus ids are 1-based, as in the case file; bus 1 is
// the angle reference.

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace smc {

struct Bus {
    int id = 0;
    std::vector<double> base_load;  // per slot, MW
};

struct Line {
    int from_bus = 0;
    int to_bus = 0;
    double reactance_pu = 0.0;
    std::optional<double> flow_min;  // MW
    std::optional<double> flow_max;  // MW
};

struct Generator {
    int bus = 0;
    double cost_a = 0.0;  // $/(MWh)^2
    double cost_b = 0.0;  // $/MWh
    double p_min = 0.0;
    double p_max = 0.0;
    double ramp_up = 0.0;    // MW per slot
    double ramp_down = 0.0;  // MW per slot
    std::optional<double> p_initial;

    double initial_output() const { return p_initial.value_or(p_min); }
    double cost(double p) const { return cost_a * p * p + cost_b * p; }
};

struct WindFarm {
    int bus = 0;
    std::vector<double> p_commit_max;  // per slot, MW
};

// A controllable end-user appliance. Consumes `energy_total` over the slot
// window [t_start, t_end] (1-based, inclusive), with per-slot power in
// [p_min, p_max] inside the window and zero outside. The utility is the
// concave per-slot quadratic  sum_t -1/2 gamma_t p_t^2 + delta_t p_t;
// empty coefficient vectors mean zero.
struct Appliance {
    int aggregator = 0;
    int user = 0;
    int id = 0;
    double energy_total = 0.0;
    double p_min = 0.0;
    double p_max = 0.0;
    int t_start = 1;
    int t_end = 1;
    std::vector<double> utility_gamma;
    std::vector<double> utility_delta;

    int span() const { return t_end - t_start + 1; }
    bool in_window(int slot) const { return slot >= t_start && slot <= t_end; }
    double gamma(int slot) const { return utility_gamma.empty() ? 0.0 : utility_gamma[slot - 1]; }
    double delta(int slot) const { return utility_delta.empty() ? 0.0 : utility_delta[slot - 1]; }
    double utility(const std::vector<double>& schedule) const;
};

struct Aggregator {
    int bus = 0;
    double p_dra_max = 0.0;
    std::vector<Appliance> appliances;
};

struct NetworkCase {
    int horizon = 0;
    double mva_base = 100.0;
    std::vector<Bus> buses;
    std::vector<Line> lines;
    std::vector<Generator> generators;
    std::vector<WindFarm> wind_farms;
    std::vector<Aggregator> aggregators;

    int num_buses() const { return static_cast<int>(buses.size()); }
    int num_lines() const { return static_cast<int>(lines.size()); }
    int num_generators() const { return static_cast<int>(generators.size()); }
    int num_wind() const { return static_cast<int>(wind_farms.size()); }
    int num_aggregators() const { return static_cast<int>(aggregators.size()); }
    int num_appliances() const;
    // T x N_b
    Eigen::MatrixXd base_load() const;
    // T x N_w
    Eigen::MatrixXd wind_commit_max() const;
};

struct Violation {
    std::string path;
    std::string message;
};

/// Every violated invariant, with a path such as "generators[1].p_min".
std::vector<Violation> validate_case(const NetworkCase& network);

struct FlowMatrices {
    Eigen::MatrixXd A_n;          // N_l x N_b, +1 at from bus, -1 at to bus
    Eigen::VectorXd susceptance;  // diagonal of B_s, b_l = -1/x_l
    Eigen::MatrixXd B_n;          // N_b x N_b, -A_n' B_s A_n
    Eigen::MatrixXd B_f;          // N_l x N_b, -B_s A_n  (flow in p.u. = B_f theta)
    Eigen::MatrixXd A_g;          // N_b x N_g
    Eigen::MatrixXd A_w;          // N_b x N_w
    Eigen::MatrixXd A_a;          // N_b x N_a

    Eigen::MatrixXd B_s() const { return susceptance.asDiagonal(); }
};

/// Throws std::invalid_argument on a non-positive reactance or unknown bus.
FlowMatrices build_flow_matrices(const NetworkCase& network);

// Linear description of one appliance's feasible set over the horizon.
struct ApplianceConstraints {
    int horizon = 0;
    std::vector<int> window;  // 1-based slots where consumption is allowed
    std::vector<int> pinned;  // slots forced to zero
    double energy_total = 0.0;
    double p_min = 0.0;
    double p_max = 0.0;

    bool contains(const std::vector<double>& schedule, double tol = 1e-9) const;
};

/// Throws std::invalid_argument when the window cannot deliver the energy.
ApplianceConstraints appliance_constraints(const Appliance& appliance, int horizon);

}  // namespace smc
