#include "smc/scenarios.hpp"

#include "smc/parallel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace smc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// uniform in (0, 1)
double to_unit(std::uint64_t bits) { return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53; }

}  // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t index) {
    return to_unit(splitmix64(splitmix64(seed ^ 0x5bd1e995ULL) ^ splitmix64(index)));
}

double counter_normal(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t key = splitmix64(seed ^ splitmix64(index));
    const double u1 = to_unit(splitmix64(key));
    const double u2 = to_unit(splitmix64(key + 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Eigen::MatrixXd default_sigma(const Eigen::MatrixXd& forecast, double fraction, double floor_mw) {
    return (fraction * forecast.array()).max(floor_mw).matrix();
}

ScenarioSet generate_scenarios(const Eigen::MatrixXd& forecast, const Eigen::MatrixXd& sigma, int n_samples,
                               std::uint64_t seed, int threads) {
    if (n_samples < 1) throw std::invalid_argument("number of scenarios must be positive");
    if (sigma.rows() != forecast.rows() || sigma.cols() != forecast.cols())
        throw std::invalid_argument("sigma must have the forecast's shape");
    if ((sigma.array() < 0.0).any()) throw std::invalid_argument("sigma must be nonnegative");
    ScenarioSet set;
    set.forecast = forecast;
    set.sigma = sigma;
    set.seed = seed;
    set.samples.assign(n_samples, Eigen::MatrixXd());
    const int rows = static_cast<int>(forecast.rows());
    const int cols = static_cast<int>(forecast.cols());
    parallel_for(n_samples, threads, [&](int s) {
        Eigen::MatrixXd w(rows, cols);
        for (int t = 0; t < rows; ++t)
            for (int m = 0; m < cols; ++m) {
                const std::uint64_t index = (static_cast<std::uint64_t>(s) * rows + t) * cols + m;
                w(t, m) = std::max(0.0, forecast(t, m) + sigma(t, m) * counter_normal(seed, index));
            }
        set.samples[s] = std::move(w);
    });
    return set;
}

void check_scenarios(const ScenarioSet& set) {
    if (set.samples.empty()) throw std::invalid_argument("scenario set is empty");
    for (int s = 0; s < set.num_samples(); ++s) {
        const auto& w = set.samples[s];
        if (w.rows() != set.forecast.rows() || w.cols() != set.forecast.cols())
            throw std::invalid_argument("scenario " + std::to_string(s) + " does not match the forecast shape");
        for (int t = 0; t < w.rows(); ++t)
            for (int m = 0; m < w.cols(); ++m)
                if (!(w(t, m) >= 0.0) || !std::isfinite(w(t, m)))
                    throw std::invalid_argument("negative or non-finite wind sample at [" + std::to_string(s) + "][" +
                                                std::to_string(t) + "][" + std::to_string(m) + "]");
    }
}

void check_scenario_dims(const ScenarioSet& set, int horizon, int num_wind) {
    if (set.horizon() != horizon || set.num_wind() != num_wind)
        throw std::invalid_argument("scenario set is " + std::to_string(set.horizon()) + " x " +
                                    std::to_string(set.num_wind()) + " but the case needs " + std::to_string(horizon) +
                                    " x " + std::to_string(num_wind));
}

}  // namespace smc
