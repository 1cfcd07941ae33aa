#include "smc/evaluation.hpp"

#include "smc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smc {

std::string to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::cvar_risk_limiting: return "cvar_risk_limiting";
        case PolicyKind::expected_wind: return "expected_wind";
        case PolicyKind::no_wind: return "no_wind";
    }
    return "unknown";
}

PolicyKind parse_policy(const std::string& name) {
    if (name == "cvar_risk_limiting" || name == "cvar") return PolicyKind::cvar_risk_limiting;
    if (name == "expected_wind" || name == "expected") return PolicyKind::expected_wind;
    if (name == "no_wind" || name == "none") return PolicyKind::no_wind;
    throw std::invalid_argument("unknown policy '" + name + "'");
}

DispatchSolution dispatch_policy(const PolicySpec& policy, const NetworkCase& nc, const PriceSchedule& prices,
                                 const ScenarioSet& scenarios) {
    switch (policy.kind) {
        case PolicyKind::cvar_risk_limiting: return clear_market(nc, prices, scenarios, policy.config);
        case PolicyKind::expected_wind: {
            check_scenario_dims(scenarios, nc.horizon, nc.num_wind());
            const Eigen::MatrixXd w = scenarios.forecast.cwiseMin(nc.wind_commit_max()).cwiseMax(0.0);
            return solve_pinned_wind(nc, w, policy.config.qp);
        }
        case PolicyKind::no_wind:
            return solve_pinned_wind(nc, Eigen::MatrixXd::Zero(nc.horizon, nc.num_wind()), policy.config.qp);
    }
    throw std::invalid_argument("unknown policy");
}

double CostDistribution::quantile(double q) const {
    if (samples.empty()) throw std::invalid_argument("empty cost distribution");
    std::vector<double> s = samples;
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());
    auto k = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
    k = std::clamp<std::size_t>(k, 1, s.size());
    return s[k - 1];
}

double CostDistribution::cdf_at(double cost) const {
    if (samples.empty()) return 0.0;
    return static_cast<double>(std::count_if(samples.begin(), samples.end(), [&](double v) { return v <= cost; })) /
           static_cast<double>(samples.size());
}

CostDistribution evaluate_policy(PolicyKind policy, const DispatchSolution& d, const PriceSchedule& prices,
                                 const ScenarioSet& eval, int threads, int cdf_points) {
    if (eval.num_samples() < 1) throw std::invalid_argument("evaluation needs at least one scenario");
    if (eval.horizon() != d.p_wind.rows() || eval.num_wind() != d.p_wind.cols())
        throw std::invalid_argument("evaluation scenarios are " + std::to_string(eval.horizon()) + "x" +
                                    std::to_string(eval.num_wind()) + ", dispatch wind is " +
                                    std::to_string(d.p_wind.rows()) + "x" + std::to_string(d.p_wind.cols()));
    if (cdf_points < 1) throw std::invalid_argument("cdf_points must be positive");

    CostDistribution out;
    out.policy = policy;
    out.generation_cost = d.generation_cost;
    out.utility = d.utility;
    const double fixed = d.generation_cost - d.utility;
    const int n = eval.num_samples();
    out.samples.assign(n, fixed);
    if (policy != PolicyKind::no_wind)
        parallel_for(n, threads, [&](int s) { out.samples[s] = fixed + transaction_cost(d.p_wind, eval.samples[s], prices); });

    // moments of the variable part, so a constant distribution has std exactly 0
    double sum = 0.0;
    for (double v : out.samples) sum += v - fixed;
    const double shift = sum / n;
    out.mean = fixed + shift;
    double ss = 0.0;
    for (double v : out.samples) ss += (v - fixed - shift) * (v - fixed - shift);
    out.stddev = std::sqrt(ss / n);

    std::vector<double> sorted = out.samples;
    std::sort(sorted.begin(), sorted.end());
    auto q = [&](double p) {
        auto k = static_cast<std::size_t>(std::ceil(p * n - 1e-9));
        return sorted[std::clamp<std::size_t>(k, 1, sorted.size()) - 1];
    };
    out.q25 = q(0.25);
    out.q50 = q(0.5);
    out.q75 = q(0.75);

    const double lo = sorted.front(), hi = sorted.back();
    const int points = lo == hi ? 1 : cdf_points;
    std::size_t k = 0;
    for (int i = 0; i < points; ++i) {
        const double x = points == 1 ? hi : (i == points - 1 ? hi : lo + (hi - lo) * i / (points - 1));
        while (k < sorted.size() && sorted[k] <= x) ++k;
        out.cdf.push_back({x, static_cast<double>(k) / n});
    }
    return out;
}

std::vector<MuSweepRow> mu_sweep(const NetworkCase& nc, const PriceSchedule& prices, const ScenarioSet& scenarios,
                                 const std::vector<double>& grid, const ClearingConfig& config) {
    if (grid.empty()) throw std::invalid_argument("mu grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0) || !std::isfinite(grid[i]))
            throw std::invalid_argument("mu grid entry " + std::to_string(i) + " must be positive");
        if (i > 0 && grid[i] < grid[i - 1]) throw std::invalid_argument("mu grid must be ascending");
    }
    std::vector<MuSweepRow> rows;
    for (double mu : grid) {
        ClearingConfig c = config;
        c.risk.mu = mu;
        MuSweepRow row;
        row.mu = mu;
        try {
            const auto d = clear_market(nc, prices, scenarios, c);
            row.ok = d.converged;
            row.status = d.status;
            row.generation_cost = d.generation_cost;
            row.cvar_term = d.cvar_term;
            row.utility = d.utility;
            row.objective = d.objective;
            row.wind_committed = d.p_wind.sum();
            row.iterations = d.iterations;
        } catch (const ClearingError& e) {
            row.ok = false;
            row.status = e.what();
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace smc
