#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace smc {

// Wind power trajectories. `samples[s]` is a T x N_w matrix in MW.
struct ScenarioSet {
    Eigen::MatrixXd forecast;  // T x N_w
    std::vector<Eigen::MatrixXd> samples;
    std::uint64_t seed = 0;
    // noise scale actually used, T x N_w (MW); empty when loaded without it
    Eigen::MatrixXd sigma;

    int num_samples() const { return static_cast<int>(samples.size()); }
    int horizon() const { return static_cast<int>(forecast.rows()); }
    int num_wind() const { return static_cast<int>(forecast.cols()); }
};

/// Default forecast-error scale: 20% of the per-slot forecast, floored at
/// 0.5 MW.
Eigen::MatrixXd default_sigma(const Eigen::MatrixXd& forecast, double fraction = 0.2, double floor_mw = 0.5);

/// samples[s](t, m) = max(0, forecast(t, m) + sigma(t, m) * N(0, 1)).
/// Each draw depends only on (seed, s, t, m), so the set is identical for
/// any thread count. Throws std::invalid_argument for n_samples < 1 or a
/// negative sigma.
ScenarioSet generate_scenarios(const Eigen::MatrixXd& forecast, const Eigen::MatrixXd& sigma, int n_samples,
                               std::uint64_t seed, int threads = 1);

/// Throws std::invalid_argument naming the first negative or non-finite
/// entry, or a sample whose shape differs from the forecast.
void check_scenarios(const ScenarioSet& set);

/// Throws std::invalid_argument when the set's shape does not fit the case.
void check_scenario_dims(const ScenarioSet& set, int horizon, int num_wind);

// Counter-based draws: each value depends only on (seed, index).
double counter_uniform(std::uint64_t seed, std::uint64_t index);  // (0, 1)
double counter_normal(std::uint64_t seed, std::uint64_t index);   // splitmix64 + Box-Muller

}  // namespace smc
