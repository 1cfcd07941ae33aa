#include "smc/pricing.hpp"

#include <stdexcept>

namespace smc {

Eigen::MatrixXd extract_lmps(const DispatchSolution& solution) {
    if (solution.tau.size() == 0 || solution.tau.rows() != solution.theta.rows() ||
        solution.tau.cols() != solution.theta.cols())
        throw std::invalid_argument("solution carries no nodal prices");
    return solution.tau;
}

namespace {

void require_shape(const Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols, const char* what) {
    if (m.rows() != rows || m.cols() != cols)
        throw std::invalid_argument(std::string("settlement: ") + what + " has shape " + std::to_string(m.rows()) +
                                    "x" + std::to_string(m.cols()) + ", expected " + std::to_string(rows) + "x" +
                                    std::to_string(cols));
}

}  // namespace

SettlementReport resettle(const SettlementReport& in) {
    const Eigen::Index T = in.da_tau.rows(), nb = in.da_tau.cols();
    const Eigen::Index ng = static_cast<Eigen::Index>(in.generator_bus.size());
    const Eigen::Index na = static_cast<Eigen::Index>(in.aggregator_bus.size());
    const Eigen::Index nw = static_cast<Eigen::Index>(in.wind_bus.size());
    require_shape(in.rt_tau, T, nb, "real-time prices");
    require_shape(in.da_p_gen, T, ng, "day-ahead generation");
    require_shape(in.rt_p_gen, T, ng, "real-time generation");
    require_shape(in.da_p_dra, T, na, "day-ahead aggregator demand");
    require_shape(in.rt_p_dra, T, na, "real-time aggregator demand");
    require_shape(in.da_p_wind, T, nw, "day-ahead wind");
    require_shape(in.realized_wind, T, nw, "realized wind");
    require_shape(in.purchase, T, nw, "purchase prices");
    require_shape(in.sell, T, nw, "sell prices");
    auto bus = [&](int b) {
        if (b < 1 || b > nb) throw std::invalid_argument("settlement: bus " + std::to_string(b) + " out of range");
        return b - 1;
    };

    SettlementReport out = in;
    out.generator = Eigen::VectorXd::Zero(ng);
    out.aggregator = Eigen::VectorXd::Zero(na);
    out.wind = Eigen::VectorXd::Zero(nw);
    for (Eigen::Index i = 0; i < ng; ++i) {
        const int n = bus(in.generator_bus[i]);
        for (Eigen::Index t = 0; t < T; ++t)
            out.generator[i] += in.da_tau(t, n) * in.da_p_gen(t, i) + in.rt_tau(t, n) * (in.rt_p_gen(t, i) - in.da_p_gen(t, i));
    }
    for (Eigen::Index j = 0; j < na; ++j) {
        const int n = bus(in.aggregator_bus[j]);
        for (Eigen::Index t = 0; t < T; ++t)
            out.aggregator[j] += in.da_tau(t, n) * in.da_p_dra(t, j) + in.rt_tau(t, n) * (in.rt_p_dra(t, j) - in.da_p_dra(t, j));
    }
    for (Eigen::Index m = 0; m < nw; ++m) {
        const int n = bus(in.wind_bus[m]);
        for (Eigen::Index t = 0; t < T; ++t) {
            const double p = in.da_p_wind(t, m), w = in.realized_wind(t, m);
            out.wind[m] += in.da_tau(t, n) * p + in.sell(t, m) * std::max(w - p, 0.0) -
                           in.purchase(t, m) * std::max(p - w, 0.0);
        }
    }
    return out;
}

SettlementReport settle(const NetworkCase& nc, const DispatchSolution& d, const Eigen::MatrixXd& rt_tau,
                        const Eigen::MatrixXd& realized_wind, const PriceSchedule& prices,
                        const std::optional<RealTimeQuantities>& rt) {
    SettlementReport r;
    for (const auto& g : nc.generators) r.generator_bus.push_back(g.bus);
    for (const auto& a : nc.aggregators) r.aggregator_bus.push_back(a.bus);
    for (const auto& w : nc.wind_farms) r.wind_bus.push_back(w.bus);
    r.da_tau = extract_lmps(d);
    r.rt_tau = rt_tau;
    r.da_p_gen = d.p_gen;
    r.da_p_dra = d.p_dra;
    r.rt_p_gen = rt ? rt->p_gen : d.p_gen;
    r.rt_p_dra = rt ? rt->p_dra : d.p_dra;
    r.da_p_wind = d.p_wind;
    r.realized_wind = realized_wind;
    r.purchase = prices.purchase;
    r.sell = prices.sell;
    return resettle(r);
}

}  // namespace smc
