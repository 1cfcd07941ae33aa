#include "smc/clearing.hpp"
#include "smc/parallel.hpp"

#include "assembly.hpp"

#include <chrono>

namespace smc {

IsoView::IsoView(const NetworkCase& full) : network(full) {
    for (auto& agg : network.aggregators) agg.appliances.clear();
}

namespace {

// ISO program with the augmented-Lagrangian terms left out; only c and the
// offset change between iterations.
struct IsoProgram {
    QuadraticProgram base;
    ClearingLayout layout;
    int num_scenarios = 0;

    IsoProgram(const NetworkCase& nc, const PriceSchedule& prices, const ScenarioSet& scenarios,
               const ClearingConfig& config) {
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
        opt.risk = &config.risk;
        layout = detail::add_network_block(b, nc, fm, opt);
        const int na = nc.num_aggregators();
        for (int t = 0; t < nc.horizon; ++t)
            for (int j = 0; j < na; ++j) {
                const int v = layout.p_dra[t * na + j];
                b.add_quadratic(v, v, config.rho);
            }
        base = b.build();
        num_scenarios = scenarios.num_samples();
    }

    IsoUpdate solve(const NetworkCase& nc, const ClearingConfig& config, const Eigen::MatrixXd& lambda,
                    const Eigen::MatrixXd& consumption) const {
        const int T = nc.horizon, na = nc.num_aggregators(), nb = nc.num_buses();
        if (lambda.rows() != T || lambda.cols() != na || consumption.rows() != T || consumption.cols() != na)
            throw std::invalid_argument("ISO step: multiplier or consumption has the wrong shape");
        QuadraticProgram qp = base;
        for (int t = 0; t < T; ++t)
            for (int j = 0; j < na; ++j) {
                const int v = layout.p_dra[t * na + j];
                qp.c[v] += lambda(t, j) - config.rho * consumption(t, j);
                qp.offset += 0.5 * config.rho * consumption(t, j) * consumption(t, j);
            }
        const QpSolution sol = solve_qp(qp, config.qp);
        if (sol.status != QpStatus::optimal)
            throw ClearingError("ISO subproblem failed: " + to_string(sol.status), sol.status);
        IsoUpdate out;
        out.p_gen = detail::gather(sol.x, layout.p_gen, T, nc.num_generators());
        out.p_wind = detail::gather(sol.x, layout.p_wind, T, nc.num_wind());
        out.p_dra = detail::gather(sol.x, layout.p_dra, T, na);
        out.theta = detail::gather(sol.x, layout.theta, T, nb);
        out.tau.resize(T, nb);
        for (int t = 0; t < T; ++t)
            for (int n = 0; n < nb; ++n) out.tau(t, n) = -sol.duals_eq[layout.balance_rows[t * nb + n]];
        out.eta = sol.x[layout.eta];
        out.u.resize(static_cast<int>(layout.u.size()));
        for (std::size_t s = 0; s < layout.u.size(); ++s) out.u[s] = sol.x[layout.u[s]];
        out.generation_cost = detail::generation_cost(nc, out.p_gen);
        out.cvar_term = detail::cvar_term(layout, sol.x, num_scenarios, config.risk.beta);
        out.kkt = sol.kkt;
        return out;
    }
};

}  // namespace

IsoUpdate iso_subproblem(const IsoView& iso, const PriceSchedule& prices, const ScenarioSet& scenarios,
                         const ClearingConfig& config, const Eigen::MatrixXd& lambda,
                         const Eigen::MatrixXd& consumption) {
    config.validate();
    return IsoProgram(iso.network, prices, scenarios, config).solve(iso.network, config, lambda, consumption);
}

AggregatorUpdate aggregator_subproblem(const Aggregator& agg, int horizon, double rho,
                                       const std::vector<double>& lambda, const std::vector<double>& target,
                                       const QpSettings& settings) {
    const int T = horizon;
    if (static_cast<int>(lambda.size()) != T || static_cast<int>(target.size()) != T)
        throw std::invalid_argument("aggregator step: message length differs from the horizon");
    if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
    AggregatorUpdate out;
    out.consumption.assign(T, 0.0);
    if (agg.appliances.empty()) return out;

    QpBuilder b;
    std::vector<QpBuilder::Row> sum(T);
    std::vector<int> q(T);
    for (int t = 0; t < T; ++t) {
        q[t] = b.add_variable("q[" + std::to_string(t + 1) + "]", -lambda[t] - rho * target[t]);
        b.add_quadratic(q[t], q[t], rho);
        b.add_offset(0.5 * rho * target[t] * target[t]);
        sum[t].add(q[t], 1.0);
    }
    std::vector<std::vector<int>> vars;
    for (std::size_t k = 0; k < agg.appliances.size(); ++k) {
        const auto& ap = agg.appliances[k];
        if (ap.t_start < 1 || ap.t_end > T || ap.t_end < ap.t_start)
            throw std::invalid_argument("appliance " + std::to_string(k + 1) + " window lies outside the horizon");
        std::vector<int> v(T, -1);
        QpBuilder::Row energy;
        for (int t = ap.t_start; t <= ap.t_end; ++t) {
            v[t - 1] = b.add_variable("p[" + std::to_string(k + 1) + "][" + std::to_string(t) + "]", -ap.delta(t));
            if (ap.gamma(t) != 0.0) b.add_quadratic(v[t - 1], v[t - 1], ap.gamma(t));
            b.add_inequality(QpBuilder::Row{}.add(v[t - 1], 1.0), ap.p_max);
            b.add_inequality(QpBuilder::Row{}.add(v[t - 1], -1.0), -ap.p_min);
            energy.add(v[t - 1], 1.0);
            sum[t - 1].add(v[t - 1], -1.0);
        }
        b.add_equality(energy, ap.energy_total);
        vars.push_back(std::move(v));
    }
    for (int t = 0; t < T; ++t) b.add_equality(sum[t], 0.0);

    const QpSolution sol = solve_qp(b.build(), settings);
    if (sol.status != QpStatus::optimal)
        throw ClearingError("aggregator subproblem failed: " + to_string(sol.status), sol.status);
    for (std::size_t k = 0; k < vars.size(); ++k) {
        std::vector<double> p(T, 0.0);
        for (int t = 0; t < T; ++t)
            if (vars[k][t] >= 0) {
                p[t] = sol.x[vars[k][t]];
                out.consumption[t] += p[t];
            }
        out.utility += agg.appliances[k].utility(p);
        out.schedules.push_back(std::move(p));
    }
    return out;
}

Eigen::MatrixXd dual_update(const Eigen::MatrixXd& lambda, const Eigen::MatrixXd& p_dra,
                            const Eigen::MatrixXd& consumption, double rho) {
    if (lambda.rows() != p_dra.rows() || lambda.cols() != p_dra.cols() || p_dra.rows() != consumption.rows() ||
        p_dra.cols() != consumption.cols())
        throw std::invalid_argument("dual update: shape mismatch");
    return lambda + rho * (p_dra - consumption);
}

double primal_residual(const Eigen::MatrixXd& p_dra, const Eigen::MatrixXd& consumption) {
    if (p_dra.rows() != consumption.rows() || p_dra.cols() != consumption.cols())
        throw std::invalid_argument("primal residual: shape mismatch");
    return (p_dra - consumption).norm();
}

AggregatorAgent::AggregatorAgent(int index, Aggregator data, int horizon, double rho, QpSettings settings)
    : index_(index), data_(std::move(data)), horizon_(horizon), rho_(rho), settings_(settings) {}

AggregatorToIso AggregatorAgent::respond(const IsoToAggregator& message) {
    if (message.aggregator != index_) throw std::invalid_argument("message delivered to the wrong aggregator");
    last_ = aggregator_subproblem(data_, horizon_, rho_, message.lambda, message.target, settings_);
    return {index_, last_.consumption};
}

std::vector<AggregatorToIso> InProcessChannel::exchange(const std::vector<IsoToAggregator>& messages) {
    std::vector<AggregatorToIso> replies(messages.size());
    parallel_for(static_cast<int>(messages.size()), threads_, [&](int i) {
        const int j = messages[i].aggregator;
        if (j < 0 || j >= static_cast<int>(agents_.size())) throw std::invalid_argument("unknown aggregator");
        replies[i] = agents_[j].respond(messages[i]);
    });
    return replies;
}

AdmmResult run_admm(const IsoView& iso, const PriceSchedule& prices, const ScenarioSet& scenarios,
                    const ClearingConfig& config, AggregatorChannel& channel,
                    const std::function<double()>& utility_probe, Eigen::MatrixXd initial_lambda) {
    config.validate();
    const NetworkCase& nc = iso.network;
    const int T = nc.horizon, na = nc.num_aggregators();
    const IsoProgram program(nc, prices, scenarios, config);

    AdmmResult result;
    result.lambda = initial_lambda.size() ? std::move(initial_lambda) : Eigen::MatrixXd::Zero(T, na);
    if (result.lambda.rows() != T || result.lambda.cols() != na)
        throw std::invalid_argument("initial multiplier has the wrong shape");
    result.consumption = Eigen::MatrixXd::Zero(T, na);

    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    for (int k = 1; k <= config.max_admm_iter; ++k) {
        try {
            result.iso = program.solve(nc, config, result.lambda, result.consumption);
        } catch (const ClearingError& e) {
            throw ClearingError(e.what(), e.status(), k);
        }

        std::vector<IsoToAggregator> messages(na);
        for (int j = 0; j < na; ++j) {
            messages[j].aggregator = j;
            messages[j].lambda.resize(T);
            messages[j].target.resize(T);
            for (int t = 0; t < T; ++t) {
                messages[j].lambda[t] = result.lambda(t, j);
                messages[j].target[t] = result.iso.p_dra(t, j);
            }
        }
        std::vector<AggregatorToIso> replies;
        try {
            replies = channel.exchange(messages);
        } catch (const ClearingError& e) {
            throw ClearingError(e.what(), e.status(), k);
        }
        Eigen::MatrixXd consumption = Eigen::MatrixXd::Zero(T, na);
        std::vector<bool> seen(na, false);
        for (const auto& r : replies) {
            if (r.aggregator < 0 || r.aggregator >= na || seen[r.aggregator] ||
                static_cast<int>(r.consumption.size()) != T)
                throw std::runtime_error("malformed aggregator reply");
            seen[r.aggregator] = true;
            for (int t = 0; t < T; ++t) consumption(t, r.aggregator) = r.consumption[t];
        }
        if (std::find(seen.begin(), seen.end(), false) != seen.end())
            throw std::runtime_error("missing aggregator reply");

        const double dual = config.rho * (consumption - result.consumption).norm();
        result.consumption = std::move(consumption);
        result.lambda = dual_update(result.lambda, result.iso.p_dra, result.consumption, config.rho);
        const double xi = primal_residual(result.iso.p_dra, result.consumption);

        TraceRow row;
        row.iteration = k;
        row.objective = result.iso.generation_cost + config.risk.mu * result.iso.cvar_term -
                        (utility_probe ? utility_probe() : 0.0);
        row.primal_residual = xi;
        row.dual_residual = dual;
        row.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
        result.trace.push_back(row);
        result.iterations = k;
        if (xi <= config.eps_pri) {
            result.converged = true;
            break;
        }
    }
    return result;
}

DispatchSolution admm_solve(const NetworkCase& nc, const PriceSchedule& prices, const ScenarioSet& scenarios,
                            const ClearingConfig& config) {
    config.validate();
    auto violations = validate_case(nc);
    if (!violations.empty())
        throw std::invalid_argument("invalid case: " + violations.front().path + ": " + violations.front().message);

    std::vector<AggregatorAgent> agents;
    for (int j = 0; j < nc.num_aggregators(); ++j)
        agents.emplace_back(j, nc.aggregators[j], nc.horizon, config.rho, config.qp);
    InProcessChannel channel(agents, config.threads);
    const auto probe = [&agents] {
        double total = 0.0;
        for (const auto& a : agents) total += a.utility();
        return total;
    };
    const IsoView iso(nc);
    AdmmResult r = run_admm(iso, prices, scenarios, config, channel, probe);

    DispatchSolution out;
    out.p_gen = r.iso.p_gen;
    out.p_wind = r.iso.p_wind;
    out.p_dra = r.iso.p_dra;
    out.theta = r.iso.theta;
    out.tau = r.iso.tau;
    out.eta = r.iso.eta;
    out.u = r.iso.u;
    out.lambda = -r.lambda;
    for (const auto& a : agents) out.appliance.push_back(a.schedules());
    for (std::size_t j = 0; j < out.appliance.size(); ++j)
        if (out.appliance[j].empty())
            out.appliance[j].assign(nc.aggregators[j].appliances.size(), std::vector<double>(nc.horizon, 0.0));
    out.generation_cost = r.iso.generation_cost;
    out.utility = probe();
    out.cvar_term = r.iso.cvar_term;
    out.objective = out.generation_cost - out.utility + config.risk.mu * out.cvar_term;
    out.converged = r.converged;
    out.status = r.converged ? "converged" : "max_iter";
    out.iterations = r.iterations;
    out.kkt = r.iso.kkt;
    out.trace = std::move(r.trace);
    return out;
}

}  // namespace smc
