#include "smc/clearing.hpp"

#include "assembly.hpp"

#include <sstream>

namespace smc {

void ClearingConfig::validate() const {
    risk.validate();
    if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
    if (!(eps_pri > 0.0)) throw std::invalid_argument("eps_pri must be positive");
    if (max_admm_iter < 1) throw std::invalid_argument("max_admm_iter must be at least 1");
    if (!(qp.tol > 0.0) || qp.max_iter < 1) throw std::invalid_argument("invalid QP tolerance or iteration cap");
}

void require_convexity(const PriceSchedule& prices) {
    if (check_convexity_condition(prices)) return;
    std::ostringstream msg;
    msg << "sell price exceeds purchase price (the CVaR cost would be nonconvex) at";
    int shown = 0;
    for (int t = 0; t < prices.horizon(); ++t)
        for (int m = 0; m < prices.num_wind(); ++m)
            if (prices.sell(t, m) > prices.purchase(t, m) && shown++ < 20)
                msg << " (farm " << m + 1 << ", slot " << t + 1 << ")";
    throw ConvexityError(msg.str());
}

namespace detail {

Eigen::MatrixXd gather(const Eigen::VectorXd& x, const std::vector<int>& index, int rows, int cols) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, cols);
    for (int t = 0; t < rows; ++t)
        for (int i = 0; i < cols; ++i) out(t, i) = x[index[t * cols + i]];
    return out;
}

double generation_cost(const NetworkCase& network, const Eigen::MatrixXd& p_gen) {
    double cost = 0.0;
    for (int t = 0; t < p_gen.rows(); ++t)
        for (int i = 0; i < p_gen.cols(); ++i) cost += network.generators[i].cost(p_gen(t, i));
    return cost;
}

double cvar_term(const ClearingLayout& layout, const Eigen::VectorXd& x, int num_scenarios, double beta) {
    if (layout.eta < 0) return 0.0;
    double tail = 0.0;
    for (int idx : layout.u) tail += x[idx];
    return x[layout.eta] + tail / (num_scenarios * (1.0 - beta));
}

ClearingLayout add_network_block(QpBuilder& b, const NetworkCase& nc, const FlowMatrices& fm,
                                 const NetworkBlockOptions& opt) {
    const int T = nc.horizon;
    const int ng = nc.num_generators(), nw = nc.num_wind(), na = nc.num_aggregators(), nb = nc.num_buses();
    const double base = nc.mva_base;
    ClearingLayout lay;
    lay.horizon = T;

    for (int t = 0; t < T; ++t)
        for (int i = 0; i < ng; ++i) {
            const auto& g = nc.generators[i];
            const int v = b.add_variable("p_gen[" + std::to_string(t + 1) + "][" + std::to_string(i + 1) + "]", g.cost_b);
            b.add_quadratic(v, v, 2.0 * g.cost_a);
            lay.p_gen.push_back(v);
        }
    if (!opt.pinned_wind)
        for (int t = 0; t < T; ++t)
            for (int m = 0; m < nw; ++m)
                lay.p_wind.push_back(b.add_variable("p_wind[" + std::to_string(t + 1) + "][" + std::to_string(m + 1) + "]"));
    for (int t = 0; t < T; ++t)
        for (int j = 0; j < na; ++j)
            lay.p_dra.push_back(b.add_variable("p_dra[" + std::to_string(t + 1) + "][" + std::to_string(j + 1) + "]"));
    for (int t = 0; t < T; ++t)
        for (int n = 0; n < nb; ++n)
            lay.theta.push_back(b.add_variable("theta[" + std::to_string(t + 1) + "][" + std::to_string(n + 1) + "]"));

    const Eigen::MatrixXd load = nc.base_load();
    for (int t = 0; t < T; ++t)
        for (int n = 0; n < nb; ++n) {
            QpBuilder::Row row;
            double rhs = load(t, n);
            for (int i = 0; i < ng; ++i)
                if (fm.A_g(n, i) != 0.0) row.add(lay.p_gen[t * ng + i], fm.A_g(n, i));
            for (int m = 0; m < nw; ++m)
                if (fm.A_w(n, m) != 0.0) {
                    if (opt.pinned_wind) rhs -= fm.A_w(n, m) * (*opt.pinned_wind)(t, m);
                    else row.add(lay.p_wind[t * nw + m], fm.A_w(n, m));
                }
            for (int j = 0; j < na; ++j)
                if (fm.A_a(n, j) != 0.0) row.add(lay.p_dra[t * na + j], -fm.A_a(n, j));
            for (int k = 0; k < nb; ++k)
                if (fm.B_n(n, k) != 0.0) row.add(lay.theta[t * nb + k], -base * fm.B_n(n, k));
            lay.balance_rows.push_back(b.add_equality(row, rhs));
        }
    for (int t = 0; t < T; ++t) b.add_equality(QpBuilder::Row{}.add(lay.theta[t * nb], 1.0), 0.0);

    for (int i = 0; i < ng; ++i) {
        const auto& g = nc.generators[i];
        for (int t = 0; t < T; ++t) {
            const int v = lay.p_gen[t * ng + i];
            b.add_inequality(QpBuilder::Row{}.add(v, 1.0), g.p_max);
            b.add_inequality(QpBuilder::Row{}.add(v, -1.0), -g.p_min);
            if (t == 0) {
                b.add_inequality(QpBuilder::Row{}.add(v, 1.0), g.ramp_up + g.initial_output());
                b.add_inequality(QpBuilder::Row{}.add(v, -1.0), g.ramp_down - g.initial_output());
            } else {
                const int prev = lay.p_gen[(t - 1) * ng + i];
                b.add_inequality(QpBuilder::Row{}.add(v, 1.0).add(prev, -1.0), g.ramp_up);
                b.add_inequality(QpBuilder::Row{}.add(v, -1.0).add(prev, 1.0), g.ramp_down);
            }
        }
    }

    for (int l = 0; l < nc.num_lines(); ++l) {
        const auto& line = nc.lines[l];
        if (!line.flow_min && !line.flow_max) continue;
        for (int t = 0; t < T; ++t) {
            QpBuilder::Row up, down;
            for (int k = 0; k < nb; ++k)
                if (fm.B_f(l, k) != 0.0) {
                    up.add(lay.theta[t * nb + k], base * fm.B_f(l, k));
                    down.add(lay.theta[t * nb + k], -base * fm.B_f(l, k));
                }
            if (line.flow_max) b.add_inequality(up, *line.flow_max);
            if (line.flow_min) b.add_inequality(down, -*line.flow_min);
        }
    }

    if (!opt.pinned_wind) {
        const Eigen::MatrixXd cap = nc.wind_commit_max();
        for (int t = 0; t < T; ++t)
            for (int m = 0; m < nw; ++m) {
                const int v = lay.p_wind[t * nw + m];
                b.add_inequality(QpBuilder::Row{}.add(v, 1.0), cap(t, m));
                b.add_inequality(QpBuilder::Row{}.add(v, -1.0), 0.0);
            }
    }
    for (int t = 0; t < T; ++t)
        for (int j = 0; j < na; ++j) {
            const int v = lay.p_dra[t * na + j];
            b.add_inequality(QpBuilder::Row{}.add(v, 1.0), nc.aggregators[j].p_dra_max);
            if (opt.dra_floor) b.add_inequality(QpBuilder::Row{}.add(v, -1.0), 0.0);
        }

    if (opt.scenarios && !opt.pinned_wind) {
        const auto& prices = *opt.prices;
        const auto& sc = *opt.scenarios;
        const double mu = opt.risk->mu;
        const int ns = sc.num_samples();
        const Eigen::MatrixXd varpi = prices.half_spread();
        const Eigen::MatrixXd vartheta = prices.midpoint();
        lay.eta = b.add_variable("eta", mu);
        for (int s = 0; s < ns; ++s) {
            const int u = b.add_variable("u[" + std::to_string(s + 1) + "]", mu / (ns * (1.0 - opt.risk->beta)));
            lay.u.push_back(u);
            b.add_inequality(QpBuilder::Row{}.add(u, -1.0), 0.0);
        }
        for (int s = 0; s < ns; ++s) {
            const auto& w = sc.samples[s];
            // sum_{t,m} varpi e + vartheta (p - w) <= u_s + eta
            QpBuilder::Row row;
            double rhs = 0.0;
            for (int t = 0; t < T; ++t)
                for (int m = 0; m < nw; ++m) {
                    const int p = lay.p_wind[t * nw + m];
                    if (vartheta(t, m) != 0.0) row.add(p, vartheta(t, m));
                    rhs += vartheta(t, m) * w(t, m);
                    if (varpi(t, m) > 0.0) {
                        const int e = b.add_variable("e[" + std::to_string(s + 1) + "][" + std::to_string(t + 1) + "][" +
                                                     std::to_string(m + 1) + "]");
                        ++lay.num_epigraph;
                        b.add_inequality(QpBuilder::Row{}.add(p, 1.0).add(e, -1.0), w(t, m));
                        b.add_inequality(QpBuilder::Row{}.add(p, -1.0).add(e, -1.0), -w(t, m));
                        row.add(e, varpi(t, m));
                    }
                }
            row.add(lay.u[s], -1.0).add(lay.eta, -1.0);
            b.add_inequality(row, rhs);
        }
    }
    return lay;
}

void add_appliance_block(QpBuilder& b, const NetworkCase& nc, ClearingLayout& lay) {
    const int T = nc.horizon;
    const int na = nc.num_aggregators();
    lay.appliance.assign(na, {});
    lay.aggregator_rows.assign(T * na, -1);
    for (int j = 0; j < na; ++j) {
        const auto& agg = nc.aggregators[j];
        std::vector<QpBuilder::Row> balance(T);
        for (int t = 0; t < T; ++t) balance[t].add(lay.p_dra[t * na + j], 1.0);
        for (std::size_t k = 0; k < agg.appliances.size(); ++k) {
            const auto& ap = agg.appliances[k];
            std::vector<int> vars(T, -1);
            QpBuilder::Row energy;
            for (int t = ap.t_start; t <= ap.t_end; ++t) {
                const int v = b.add_variable("p[" + std::to_string(j + 1) + "][" + std::to_string(k + 1) + "][" +
                                                 std::to_string(t) + "]",
                                             -ap.delta(t));
                if (ap.gamma(t) != 0.0) b.add_quadratic(v, v, ap.gamma(t));
                b.add_inequality(QpBuilder::Row{}.add(v, 1.0), ap.p_max);
                b.add_inequality(QpBuilder::Row{}.add(v, -1.0), -ap.p_min);
                energy.add(v, 1.0);
                balance[t - 1].add(v, -1.0);
                vars[t - 1] = v;
            }
            b.add_equality(energy, ap.energy_total);
            lay.appliance[j].push_back(std::move(vars));
        }
        for (int t = 0; t < T; ++t) lay.aggregator_rows[t * na + j] = b.add_equality(balance[t], 0.0);
    }
}

}  // namespace detail

namespace {

void require_valid(const NetworkCase& nc) {
    auto violations = validate_case(nc);
    if (!violations.empty())
        throw std::invalid_argument("invalid case: " + violations.front().path + ": " + violations.front().message +
                                    (violations.size() > 1 ? " (+" + std::to_string(violations.size() - 1) + " more)" : ""));
}

DispatchSolution extract(const NetworkCase& nc, const ClearingLayout& lay, const QpSolution& sol,
                         const Eigen::MatrixXd* pinned_wind, int num_scenarios, const RiskConfig* risk) {
    using detail::gather;
    const int T = nc.horizon;
    const int na = nc.num_aggregators(), nb = nc.num_buses();
    DispatchSolution out;
    out.p_gen = gather(sol.x, lay.p_gen, T, nc.num_generators());
    out.p_wind = pinned_wind ? *pinned_wind : gather(sol.x, lay.p_wind, T, nc.num_wind());
    out.p_dra = gather(sol.x, lay.p_dra, T, na);
    out.theta = gather(sol.x, lay.theta, T, nb);
    out.appliance.resize(na);
    for (int j = 0; j < na; ++j)
        for (std::size_t k = 0; k < lay.appliance[j].size(); ++k) {
            std::vector<double> p(T, 0.0);
            for (int t = 0; t < T; ++t)
                if (lay.appliance[j][k][t] >= 0) p[t] = sol.x[lay.appliance[j][k][t]];
            out.utility += nc.aggregators[j].appliances[k].utility(p);
            out.appliance[j].push_back(std::move(p));
        }
    if (lay.eta >= 0) {
        out.eta = sol.x[lay.eta];
        out.u.resize(static_cast<int>(lay.u.size()));
        for (std::size_t s = 0; s < lay.u.size(); ++s) out.u[s] = sol.x[lay.u[s]];
        out.cvar_term = detail::cvar_term(lay, sol.x, num_scenarios, risk->beta);
    }
    out.tau.resize(T, nb);
    for (int t = 0; t < T; ++t)
        for (int n = 0; n < nb; ++n) out.tau(t, n) = -sol.duals_eq[lay.balance_rows[t * nb + n]];
    out.lambda.resize(T, na);
    for (int t = 0; t < T; ++t)
        for (int j = 0; j < na; ++j) out.lambda(t, j) = -sol.duals_eq[lay.aggregator_rows[t * na + j]];
    out.generation_cost = detail::generation_cost(nc, out.p_gen);
    out.objective = out.generation_cost - out.utility + (risk ? risk->mu * out.cvar_term : 0.0);
    out.kkt = sol.kkt;
    out.iterations = sol.iterations;
    out.converged = sol.status == QpStatus::optimal;
    out.status = to_string(sol.status);
    return out;
}

}  // namespace

int centralized_variable_count(const NetworkCase& nc, const PriceSchedule& prices, int num_scenarios) {
    int count = nc.horizon * (nc.num_generators() + nc.num_wind() + nc.num_aggregators() + nc.num_buses());
    for (const auto& agg : nc.aggregators)
        for (const auto& ap : agg.appliances) count += ap.span();
    const Eigen::MatrixXd varpi = prices.half_spread();
    const int spread_entries = static_cast<int>((varpi.array() > 0.0).count());
    return count + 1 + num_scenarios + num_scenarios * spread_entries;
}

AssembledProgram assemble_centralized(const NetworkCase& nc, const PriceSchedule& prices, const ScenarioSet& scenarios,
                                      const RiskConfig& risk) {
    risk.validate();
    require_valid(nc);
    require_convexity(prices);
    if (prices.horizon() != nc.horizon || prices.num_wind() != nc.num_wind())
        throw std::invalid_argument("price schedule does not match the case dimensions");
    check_scenarios(scenarios);
    check_scenario_dims(scenarios, nc.horizon, nc.num_wind());

    const FlowMatrices fm = build_flow_matrices(nc);
    QpBuilder b;
    detail::NetworkBlockOptions opt;
    opt.prices = &prices;
    opt.scenarios = &scenarios;
    opt.risk = &risk;
    opt.dra_floor = false;
    AssembledProgram out;
    out.layout = detail::add_network_block(b, nc, fm, opt);
    detail::add_appliance_block(b, nc, out.layout);
    out.qp = b.build();
    return out;
}

DispatchSolution solve_centralized(const NetworkCase& nc, const PriceSchedule& prices, const ScenarioSet& scenarios,
                                   const ClearingConfig& config) {
    config.validate();
    auto program = assemble_centralized(nc, prices, scenarios, config.risk);
    const QpSolution sol = solve_qp(program.qp, config.qp);
    if (sol.status != QpStatus::optimal)
        throw ClearingError("centralized clearing failed: " + to_string(sol.status), sol.status);
    auto out = extract(nc, program.layout, sol, nullptr, scenarios.num_samples(), &config.risk);
    out.trace.push_back({1, out.objective, 0.0, 0.0, 0.0});
    return out;
}

DispatchSolution solve_pinned_wind(const NetworkCase& nc, const Eigen::MatrixXd& wind, const QpSettings& settings) {
    require_valid(nc);
    if (wind.rows() != nc.horizon || wind.cols() != nc.num_wind())
        throw std::invalid_argument("pinned wind schedule does not match the case dimensions");
    const FlowMatrices fm = build_flow_matrices(nc);
    QpBuilder b;
    detail::NetworkBlockOptions opt;
    opt.pinned_wind = &wind;
    opt.dra_floor = false;
    auto lay = detail::add_network_block(b, nc, fm, opt);
    detail::add_appliance_block(b, nc, lay);
    const auto qp = b.build();
    const QpSolution sol = solve_qp(qp, settings);
    if (sol.status != QpStatus::optimal)
        throw ClearingError("pinned-wind dispatch failed: " + to_string(sol.status), sol.status);
    return extract(nc, lay, sol, &wind, 0, nullptr);
}

DispatchSolution clear_market(const NetworkCase& nc, const PriceSchedule& prices, const ScenarioSet& scenarios,
                              const ClearingConfig& config) {
    return config.mode == ClearingMode::admm ? admm_solve(nc, prices, scenarios, config)
                                             : solve_centralized(nc, prices, scenarios, config);
}

}  // namespace smc
