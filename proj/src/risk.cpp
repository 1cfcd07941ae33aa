#include "smc/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace smc {

PriceSchedule::PriceSchedule(Eigen::MatrixXd b, Eigen::MatrixXd s) : purchase(std::move(b)), sell(std::move(s)) {
    if (purchase.rows() != sell.rows() || purchase.cols() != sell.cols())
        throw std::invalid_argument("purchase and sell prices must have the same shape");
    if ((purchase.array() < 0.0).any() || (sell.array() < 0.0).any())
        throw std::invalid_argument("prices must be nonnegative");
}

bool PriceSchedule::convexity_ok() const { return check_convexity_condition(*this); }

void RiskConfig::validate() const {
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0, 1)");
    if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
}

namespace {

void check_shapes(const Eigen::MatrixXd& p, const Eigen::MatrixXd& w, const PriceSchedule& prices) {
    if (p.rows() != w.rows() || p.cols() != w.cols() || p.rows() != prices.purchase.rows() ||
        p.cols() != prices.purchase.cols())
        throw std::invalid_argument("transaction cost: dimension mismatch");
}

}  // namespace

double transaction_cost(const Eigen::MatrixXd& p, const Eigen::MatrixXd& w, const PriceSchedule& prices) {
    check_shapes(p, w, prices);
    const Eigen::ArrayXXd gap = (p - w).array();
    return (prices.half_spread().array() * gap.abs() + prices.midpoint().array() * gap).sum();
}

double transaction_cost_hinge(const Eigen::MatrixXd& p, const Eigen::MatrixXd& w, const PriceSchedule& prices) {
    check_shapes(p, w, prices);
    const Eigen::ArrayXXd gap = (p - w).array();
    return (prices.purchase.array() * gap.max(0.0) - prices.sell.array() * (-gap).max(0.0)).sum();
}

double saa_cvar_value(std::span<const double> losses, double eta, double beta) {
    if (losses.empty()) throw std::invalid_argument("empty scenario set");
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0, 1)");
    double tail = 0.0;
    for (double l : losses) tail += std::max(0.0, l - eta);
    return eta + tail / (static_cast<double>(losses.size()) * (1.0 - beta));
}

double saa_cvar_value(const Eigen::MatrixXd& p, double eta, const ScenarioSet& scenarios, const PriceSchedule& prices,
                      double beta) {
    std::vector<double> losses;
    losses.reserve(scenarios.samples.size());
    for (const auto& w : scenarios.samples) losses.push_back(transaction_cost(p, w, prices));
    return saa_cvar_value(losses, eta, beta);
}

VarCvar empirical_var_cvar(std::span<const double> losses, double beta) {
    if (losses.empty()) throw std::invalid_argument("empty sample");
    std::vector<double> sorted(losses.begin(), losses.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();

    VarCvar out;
    // empirical CDF at sorted[k] counts ties, so step to the last copy
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t last = k;
        while (last + 1 < n && sorted[last + 1] == sorted[k]) ++last;
        if (static_cast<double>(last + 1) >= beta * static_cast<double>(n) * (1.0 - 1e-12)) {
            out.var = sorted[k];
            break;
        }
        k = last;
    }

    // objective at eta = sorted[k]: eta + (suffix_sum - count * eta) / (n (1 - beta))
    const double scale = 1.0 / (static_cast<double>(n) * (1.0 - beta));
    std::vector<double> suffix(n + 1, 0.0);
    for (std::size_t k = n; k-- > 0;) suffix[k] = suffix[k + 1] + sorted[k];
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        const double eta = sorted[k];
        std::size_t above = k + 1;
        while (above < n && sorted[above] == eta) ++above;
        const double excess = suffix[above] - static_cast<double>(n - above) * eta;
        best = std::min(best, eta + scale * excess);
    }
    out.cvar = best;
    return out;
}

bool check_convexity_condition(const PriceSchedule& prices) {
    return ((prices.purchase - prices.sell).array() >= 0.0).all();
}

}  // namespace smc
