#include "smc/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace smc {

double Appliance::utility(const std::vector<double>& schedule) const {
    double u = 0.0;
    for (int t = t_start; t <= t_end; ++t) {
        const double p = schedule.at(t - 1);
        u += -0.5 * gamma(t) * p * p + delta(t) * p;
    }
    return u;
}

int NetworkCase::num_appliances() const {
    int n = 0;
    for (const auto& a : aggregators) n += static_cast<int>(a.appliances.size());
    return n;
}

Eigen::MatrixXd NetworkCase::base_load() const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(horizon, num_buses());
    for (int n = 0; n < num_buses(); ++n)
        for (int t = 0; t < horizon && t < static_cast<int>(buses[n].base_load.size()); ++t)
            out(t, n) = buses[n].base_load[t];
    return out;
}

Eigen::MatrixXd NetworkCase::wind_commit_max() const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(horizon, num_wind());
    for (int m = 0; m < num_wind(); ++m)
        for (int t = 0; t < horizon && t < static_cast<int>(wind_farms[m].p_commit_max.size()); ++t)
            out(t, m) = wind_farms[m].p_commit_max[t];
    return out;
}

namespace {

std::string indexed(const char* name, std::size_t i) { return std::string(name) + "[" + std::to_string(i) + "]"; }

}  // namespace

std::vector<Violation> validate_case(const NetworkCase& nc) {
    std::vector<Violation> out;
    auto fail = [&](std::string path, std::string msg) { out.push_back({std::move(path), std::move(msg)}); };
    const int nb = nc.num_buses();
    auto bus_ok = [&](int id) { return id >= 1 && id <= nb; };

    if (nc.horizon < 1) fail("horizon", "must be at least 1");
    if (!(nc.mva_base > 0.0)) fail("mva_base", "must be positive");
    if (nb == 0) fail("buses", "at least one bus is required");
    if (nc.generators.empty()) fail("generators", "at least one generator is required");

    for (std::size_t i = 0; i < nc.buses.size(); ++i) {
        const auto& b = nc.buses[i];
        const auto path = indexed("buses", i);
        if (b.id != static_cast<int>(i) + 1) fail(path + ".id", "bus ids must be contiguous 1..N_b in order");
        if (static_cast<int>(b.base_load.size()) != nc.horizon)
            fail(path + ".base_load", "expected " + std::to_string(nc.horizon) + " entries");
        for (std::size_t t = 0; t < b.base_load.size(); ++t)
            if (!(b.base_load[t] >= 0.0)) fail(indexed((path + ".base_load").c_str(), t), "must be >= 0");
    }

    for (std::size_t i = 0; i < nc.lines.size(); ++i) {
        const auto& l = nc.lines[i];
        const auto path = indexed("lines", i);
        if (!bus_ok(l.from_bus)) fail(path + ".from_bus", "unknown bus " + std::to_string(l.from_bus));
        if (!bus_ok(l.to_bus)) fail(path + ".to_bus", "unknown bus " + std::to_string(l.to_bus));
        if (l.from_bus == l.to_bus) fail(path, "from_bus equals to_bus");
        if (!(l.reactance_pu > 0.0)) fail(path + ".reactance_pu", "must be > 0");
        if (l.flow_min && l.flow_max && *l.flow_min > *l.flow_max) fail(path, "flow_min > flow_max");
    }

    if (nb > 1 && out.empty()) {
        // one angle reference only, so every bus must reach bus 1
        std::vector<std::vector<int>> adj(nb);
        for (const auto& l : nc.lines) {
            adj[l.from_bus - 1].push_back(l.to_bus - 1);
            adj[l.to_bus - 1].push_back(l.from_bus - 1);
        }
        std::vector<bool> seen(nb, false);
        std::vector<int> stack = {0};
        seen[0] = true;
        while (!stack.empty()) {
            const int k = stack.back();
            stack.pop_back();
            for (int next : adj[k])
                if (!seen[next]) {
                    seen[next] = true;
                    stack.push_back(next);
                }
        }
        for (int k = 0; k < nb; ++k)
            if (!seen[k]) fail(indexed("buses", k), "not connected to bus 1");
    }

    for (std::size_t i = 0; i < nc.generators.size(); ++i) {
        const auto& g = nc.generators[i];
        const auto path = indexed("generators", i);
        if (!bus_ok(g.bus)) fail(path + ".bus", "unknown bus " + std::to_string(g.bus));
        if (!(g.cost_a >= 0.0)) fail(path + ".cost_a", "must be >= 0");
        if (!(g.p_min >= 0.0)) fail(path + ".p_min", "must be >= 0");
        if (g.p_min > g.p_max) fail(path + ".p_min", "p_min > p_max");
        if (!(g.ramp_up >= 0.0)) fail(path + ".ramp_up", "must be >= 0");
        if (!(g.ramp_down >= 0.0)) fail(path + ".ramp_down", "must be >= 0");
        if (g.p_initial && (*g.p_initial < g.p_min || *g.p_initial > g.p_max))
            fail(path + ".p_initial", "outside [p_min, p_max]");
    }

    for (std::size_t i = 0; i < nc.wind_farms.size(); ++i) {
        const auto& w = nc.wind_farms[i];
        const auto path = indexed("wind_farms", i);
        if (!bus_ok(w.bus)) fail(path + ".bus", "unknown bus " + std::to_string(w.bus));
        if (static_cast<int>(w.p_commit_max.size()) != nc.horizon)
            fail(path + ".p_commit_max", "expected " + std::to_string(nc.horizon) + " entries");
        for (std::size_t t = 0; t < w.p_commit_max.size(); ++t)
            if (!(w.p_commit_max[t] >= 0.0)) fail(indexed((path + ".p_commit_max").c_str(), t), "must be >= 0");
    }

    for (std::size_t j = 0; j < nc.aggregators.size(); ++j) {
        const auto& a = nc.aggregators[j];
        const auto path = indexed("aggregators", j);
        if (!bus_ok(a.bus)) fail(path + ".bus", "unknown bus " + std::to_string(a.bus));
        if (!(a.p_dra_max >= 0.0)) fail(path + ".p_dra_max", "must be >= 0");
        for (std::size_t k = 0; k < a.appliances.size(); ++k) {
            const auto& ap = a.appliances[k];
            const auto ap_path = path + "." + indexed("appliances", k) + " (user " + std::to_string(ap.user) +
                                 ", appliance " + std::to_string(ap.id) + ")";
            if (ap.t_start < 1 || ap.t_end > nc.horizon || ap.t_start > ap.t_end) {
                fail(ap_path, "window [" + std::to_string(ap.t_start) + ", " + std::to_string(ap.t_end) +
                                  "] invalid for horizon " + std::to_string(nc.horizon));
                continue;
            }
            if (!(ap.p_min >= 0.0)) fail(ap_path + ".p_min", "must be >= 0");
            if (ap.p_min > ap.p_max) fail(ap_path + ".p_min", "p_min > p_max");
            const double lo = ap.span() * ap.p_min;
            const double hi = ap.span() * ap.p_max;
            const double slack = 1e-12 * (1.0 + std::abs(ap.energy_total));
            if (ap.energy_total < lo - slack || ap.energy_total > hi + slack)
                fail(ap_path + ".energy_total", "not deliverable within window: need " + std::to_string(lo) +
                                                    " <= E <= " + std::to_string(hi));
            if (!ap.utility_gamma.empty() && static_cast<int>(ap.utility_gamma.size()) != nc.horizon)
                fail(ap_path + ".utility_gamma", "expected empty or one entry per slot");
            if (!ap.utility_delta.empty() && static_cast<int>(ap.utility_delta.size()) != nc.horizon)
                fail(ap_path + ".utility_delta", "expected empty or one entry per slot");
            for (double g : ap.utility_gamma)
                if (!(g >= 0.0)) {
                    fail(ap_path + ".utility_gamma", "must be >= 0 (concave utility)");
                    break;
                }
        }
    }
    return out;
}

FlowMatrices build_flow_matrices(const NetworkCase& nc) {
    const int nb = nc.num_buses();
    const int nl = nc.num_lines();
    auto check_bus = [&](int id, const char* what) {
        if (id < 1 || id > nb) throw std::invalid_argument(std::string(what) + " references unknown bus " + std::to_string(id));
    };
    FlowMatrices fm;
    fm.A_n = Eigen::MatrixXd::Zero(nl, nb);
    fm.susceptance = Eigen::VectorXd::Zero(nl);
    for (int l = 0; l < nl; ++l) {
        const auto& line = nc.lines[l];
        check_bus(line.from_bus, "line");
        check_bus(line.to_bus, "line");
        if (!(line.reactance_pu > 0.0))
            throw std::invalid_argument("line " + std::to_string(l) + " has non-positive reactance");
        fm.A_n(l, line.from_bus - 1) = 1.0;
        fm.A_n(l, line.to_bus - 1) = -1.0;
        fm.susceptance[l] = -1.0 / line.reactance_pu;
    }
    fm.B_f = -(fm.susceptance.asDiagonal() * fm.A_n);
    fm.B_n = -(fm.A_n.transpose() * fm.susceptance.asDiagonal() * fm.A_n);

    fm.A_g = Eigen::MatrixXd::Zero(nb, nc.num_generators());
    for (int i = 0; i < nc.num_generators(); ++i) {
        check_bus(nc.generators[i].bus, "generator");
        fm.A_g(nc.generators[i].bus - 1, i) = 1.0;
    }
    fm.A_w = Eigen::MatrixXd::Zero(nb, nc.num_wind());
    for (int m = 0; m < nc.num_wind(); ++m) {
        check_bus(nc.wind_farms[m].bus, "wind farm");
        fm.A_w(nc.wind_farms[m].bus - 1, m) = 1.0;
    }
    fm.A_a = Eigen::MatrixXd::Zero(nb, nc.num_aggregators());
    for (int j = 0; j < nc.num_aggregators(); ++j) {
        check_bus(nc.aggregators[j].bus, "aggregator");
        fm.A_a(nc.aggregators[j].bus - 1, j) = 1.0;
    }
    return fm;
}

bool ApplianceConstraints::contains(const std::vector<double>& p, double tol) const {
    if (static_cast<int>(p.size()) != horizon) return false;
    double total = 0.0;
    for (int t : window) {
        const double v = p[t - 1];
        if (v < p_min - tol || v > p_max + tol) return false;
        total += v;
    }
    for (int t : pinned)
        if (std::abs(p[t - 1]) > tol) return false;
    return std::abs(total - energy_total) <= tol * (1.0 + std::abs(energy_total));
}

ApplianceConstraints appliance_constraints(const Appliance& a, int horizon) {
    if (a.t_start < 1 || a.t_end > horizon || a.t_start > a.t_end)
        throw std::invalid_argument("appliance window outside horizon");
    if (a.energy_total < a.span() * a.p_min - 1e-12 || a.energy_total > a.span() * a.p_max + 1e-12)
        throw std::invalid_argument("appliance energy not deliverable within its window");
    ApplianceConstraints out;
    out.horizon = horizon;
    out.energy_total = a.energy_total;
    out.p_min = a.p_min;
    out.p_max = a.p_max;
    for (int t = 1; t <= horizon; ++t) (a.in_window(t) ? out.window : out.pinned).push_back(t);
    return out;
}

}  // namespace smc
