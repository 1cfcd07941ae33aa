#include "smc/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace smc {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("error reading " + path.string());
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("error writing " + path.string());
}

Json parse_json(const std::string& text, const std::string& source) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        // e.byte is 1-based
        const std::size_t at = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < at; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string why = e.what();
        if (auto p = why.find("syntax error"); p != std::string::npos) why = why.substr(p);
        throw FormatError(source + ": line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + why);
    }
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

std::string sha256_hex(const std::string& bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string file_sha256(const fs::path& path) { return sha256_hex(read_file(path)); }

std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) throw std::runtime_error("number formatting failed");
    return std::string(buf.data(), end);
}

// ---------------------------------------------------------------------------
// field access with paths

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
    throw FormatError((path.empty() ? std::string("document") : path) + ": " + what);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const Json& field(const Json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) bad(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) bad(join(path, key), "missing");
    return *it;
}

bool has(const Json& j, const std::string& key) {
    auto it = j.find(key);
    return it != j.end() && !it->is_null();
}

const Json& array(const Json& j, const std::string& path) {
    if (!j.is_array()) bad(path, "expected an array");
    return j;
}

double number(const Json& j, const std::string& path) {
    if (!j.is_number()) bad(path, "expected a number");
    return j.get<double>();
}

int integer(const Json& j, const std::string& path) {
    if (!j.is_number_integer()) bad(path, "expected an integer");
    const auto v = j.get<long long>();
    if (v < INT32_MIN || v > INT32_MAX) bad(path, "integer out of range");
    return static_cast<int>(v);
}

double num_field(const Json& j, const std::string& key, const std::string& path) {
    return number(field(j, key, path), join(path, key));
}

int int_field(const Json& j, const std::string& key, const std::string& path) {
    return integer(field(j, key, path), join(path, key));
}

std::optional<double> opt_field(const Json& j, const std::string& key, const std::string& path) {
    if (!has(j, key)) return std::nullopt;
    return number(j.at(key), join(path, key));
}

std::vector<double> numbers(const Json& j, const std::string& path) {
    array(j, path);
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], at(path, i)));
    return out;
}

std::vector<double> vec_field(const Json& j, const std::string& key, const std::string& path) {
    return numbers(field(j, key, path), join(path, key));
}

Eigen::MatrixXd mat_field(const Json& j, const std::string& key, const std::string& path) {
    return matrix_from_json(field(j, key, path), join(path, key));
}

template <class Fn>
auto with_source(const fs::path& path, Fn&& fn) {
    const std::string text = read_file(path);
    const Json j = parse_json(text, path.string());
    try {
        return fn(j);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

Json vector_json(const Eigen::VectorXd& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Eigen::VectorXd vector_from(const Json& j, const std::string& path) {
    const auto v = numbers(j, path);
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

Json matrix_to_json(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& j, const std::string& path) {
    array(j, path);
    if (j.empty()) return Eigen::MatrixXd(0, 0);
    const std::size_t cols = array(j[0], at(path, 0)).size();
    Eigen::MatrixXd m(j.size(), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        const auto row = numbers(j[r], at(path, r));
        if (row.size() != cols)
            bad(at(path, r), "has " + std::to_string(row.size()) + " entries, expected " + std::to_string(cols));
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = row[c];
    }
    return m;
}

// ---------------------------------------------------------------------------
// case

Json case_to_json(const NetworkCase& nc) {
    Json j;
    j["horizon"] = nc.horizon;
    j["mva_base"] = nc.mva_base;
    j["buses"] = Json::array();
    for (const auto& b : nc.buses) j["buses"].push_back({{"id", b.id}, {"base_load", b.base_load}});
    j["lines"] = Json::array();
    for (const auto& l : nc.lines) {
        Json o{{"from", l.from_bus}, {"to", l.to_bus}, {"reactance", l.reactance_pu}};
        if (l.flow_min) o["flow_min"] = *l.flow_min;
        if (l.flow_max) o["flow_max"] = *l.flow_max;
        j["lines"].push_back(o);
    }
    j["generators"] = Json::array();
    for (const auto& g : nc.generators) {
        Json o{{"bus", g.bus},         {"cost_a", g.cost_a},   {"cost_b", g.cost_b},       {"p_min", g.p_min},
               {"p_max", g.p_max},     {"ramp_up", g.ramp_up}, {"ramp_down", g.ramp_down}};
        if (g.p_initial) o["p_initial"] = *g.p_initial;
        j["generators"].push_back(o);
    }
    j["wind_farms"] = Json::array();
    for (const auto& w : nc.wind_farms) j["wind_farms"].push_back({{"bus", w.bus}, {"p_commit_max", w.p_commit_max}});
    j["aggregators"] = Json::array();
    for (const auto& a : nc.aggregators) {
        Json users = Json::array();
        std::vector<int> order;
        std::map<int, Json> by_user;
        for (const auto& ap : a.appliances) {
            Json o{{"id", ap.id},       {"energy_total", ap.energy_total}, {"p_min", ap.p_min},
                   {"p_max", ap.p_max}, {"t_start", ap.t_start},           {"t_end", ap.t_end}};
            if (!ap.utility_gamma.empty()) o["utility_gamma"] = ap.utility_gamma;
            if (!ap.utility_delta.empty()) o["utility_delta"] = ap.utility_delta;
            if (!by_user.count(ap.user)) {
                order.push_back(ap.user);
                by_user[ap.user] = Json::array();
            }
            by_user[ap.user].push_back(o);
        }
        for (int u : order) users.push_back({{"id", u}, {"appliances", by_user[u]}});
        j["aggregators"].push_back({{"bus", a.bus}, {"p_dra_max", a.p_dra_max}, {"users", users}});
    }
    return j;
}

NetworkCase case_from_json(const Json& j) {
    NetworkCase nc;
    nc.horizon = int_field(j, "horizon", "");
    if (has(j, "mva_base")) nc.mva_base = num_field(j, "mva_base", "");
    const Json& buses = array(field(j, "buses", ""), "buses");
    for (std::size_t i = 0; i < buses.size(); ++i) {
        const std::string p = at("buses", i);
        nc.buses.push_back({int_field(buses[i], "id", p), vec_field(buses[i], "base_load", p)});
    }
    if (has(j, "lines")) {
        const Json& lines = array(j.at("lines"), "lines");
        for (std::size_t i = 0; i < lines.size(); ++i) {
            const std::string p = at("lines", i);
            const Json& o = lines[i];
            nc.lines.push_back({int_field(o, "from", p), int_field(o, "to", p), num_field(o, "reactance", p),
                                opt_field(o, "flow_min", p), opt_field(o, "flow_max", p)});
        }
    }
    if (has(j, "generators")) {
        const Json& gens = array(j.at("generators"), "generators");
        for (std::size_t i = 0; i < gens.size(); ++i) {
            const std::string p = at("generators", i);
            const Json& o = gens[i];
            nc.generators.push_back({int_field(o, "bus", p), num_field(o, "cost_a", p), num_field(o, "cost_b", p),
                                     num_field(o, "p_min", p), num_field(o, "p_max", p), num_field(o, "ramp_up", p),
                                     num_field(o, "ramp_down", p), opt_field(o, "p_initial", p)});
        }
    }
    if (has(j, "wind_farms")) {
        const Json& farms = array(j.at("wind_farms"), "wind_farms");
        for (std::size_t i = 0; i < farms.size(); ++i) {
            const std::string p = at("wind_farms", i);
            nc.wind_farms.push_back({int_field(farms[i], "bus", p), vec_field(farms[i], "p_commit_max", p)});
        }
    }
    if (has(j, "aggregators")) {
        const Json& aggs = array(j.at("aggregators"), "aggregators");
        for (std::size_t a = 0; a < aggs.size(); ++a) {
            const std::string p = at("aggregators", a);
            Aggregator agg;
            agg.bus = int_field(aggs[a], "bus", p);
            agg.p_dra_max = num_field(aggs[a], "p_dra_max", p);
            const Json& users = array(field(aggs[a], "users", p), join(p, "users"));
            for (std::size_t u = 0; u < users.size(); ++u) {
                const std::string pu = at(join(p, "users"), u);
                const int uid = int_field(users[u], "id", pu);
                const Json& aps = array(field(users[u], "appliances", pu), join(pu, "appliances"));
                for (std::size_t k = 0; k < aps.size(); ++k) {
                    const std::string pk = at(join(pu, "appliances"), k);
                    const Json& o = aps[k];
                    Appliance ap;
                    ap.aggregator = static_cast<int>(a) + 1;
                    ap.user = uid;
                    ap.id = int_field(o, "id", pk);
                    ap.energy_total = num_field(o, "energy_total", pk);
                    ap.p_min = num_field(o, "p_min", pk);
                    ap.p_max = num_field(o, "p_max", pk);
                    ap.t_start = int_field(o, "t_start", pk);
                    ap.t_end = int_field(o, "t_end", pk);
                    if (has(o, "utility_gamma")) ap.utility_gamma = vec_field(o, "utility_gamma", pk);
                    if (has(o, "utility_delta")) ap.utility_delta = vec_field(o, "utility_delta", pk);
                    agg.appliances.push_back(std::move(ap));
                }
            }
            nc.aggregators.push_back(std::move(agg));
        }
    }
    return nc;
}

// ---------------------------------------------------------------------------
// prices, scenarios

Json prices_to_json(const PriceSchedule& p) {
    return {{"purchase", matrix_to_json(p.purchase)}, {"sell", matrix_to_json(p.sell)}};
}

PriceSchedule prices_from_json(const Json& j) {
    Eigen::MatrixXd b = mat_field(j, "purchase", ""), s = mat_field(j, "sell", "");
    try {
        return PriceSchedule(std::move(b), std::move(s));
    } catch (const std::invalid_argument& e) {
        bad("purchase/sell", e.what());
    }
}

Json scenarios_to_json(const ScenarioSet& set) {
    Json j;
    j["seed"] = set.seed;
    j["forecast"] = matrix_to_json(set.forecast);
    if (set.sigma.rows() > 0) j["sigma"] = matrix_to_json(set.sigma);
    j["samples"] = Json::array();
    for (const auto& s : set.samples) j["samples"].push_back(matrix_to_json(s));
    return j;
}

ScenarioSet scenarios_from_json(const Json& j) {
    ScenarioSet set;
    if (has(j, "seed")) {
        const Json& s = j.at("seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
            bad("seed", "expected a non-negative integer");
        set.seed = s.get<std::uint64_t>();
    }
    set.forecast = mat_field(j, "forecast", "");
    if (has(j, "sigma")) set.sigma = mat_field(j, "sigma", "");
    const Json& samples = array(field(j, "samples", ""), "samples");
    for (std::size_t s = 0; s < samples.size(); ++s) {
        Eigen::MatrixXd m = matrix_from_json(samples[s], at("samples", s));
        // T x 0 sets serialize as rows of empty arrays; keep the forecast shape
        if (m.rows() == 0 && set.forecast.cols() == 0) m.resize(set.forecast.rows(), 0);
        set.samples.push_back(std::move(m));
    }
    return set;
}

// ---------------------------------------------------------------------------
// solution

std::string to_string(ClearingMode mode) { return mode == ClearingMode::admm ? "admm" : "central"; }

ClearingMode parse_mode(const std::string& name) {
    if (name == "central") return ClearingMode::central;
    if (name == "admm") return ClearingMode::admm;
    throw std::invalid_argument("unknown mode '" + name + "' (expected central or admm)");
}

Json config_to_json(const ClearingConfig& c) {
    return {{"mode", to_string(c.mode)},         {"beta", c.risk.beta},   {"mu", c.risk.mu},
            {"rho", c.rho},                      {"eps_pri", c.eps_pri},  {"max_admm_iter", c.max_admm_iter},
            {"qp_tol", c.qp.tol},                {"qp_max_iter", c.qp.max_iter}};
}

namespace {

ClearingConfig config_from_json(const Json& j, const std::string& p) {
    ClearingConfig c;
    const Json& mode = field(j, "mode", p);
    if (!mode.is_string()) bad(join(p, "mode"), "expected a string");
    try {
        c.mode = parse_mode(mode.get<std::string>());
    } catch (const std::invalid_argument& e) {
        bad(join(p, "mode"), e.what());
    }
    c.risk.beta = num_field(j, "beta", p);
    c.risk.mu = num_field(j, "mu", p);
    c.rho = num_field(j, "rho", p);
    c.eps_pri = num_field(j, "eps_pri", p);
    c.max_admm_iter = int_field(j, "max_admm_iter", p);
    c.qp.tol = num_field(j, "qp_tol", p);
    c.qp.max_iter = int_field(j, "qp_max_iter", p);
    return c;
}

}  // namespace

Json solution_to_json(const SolutionArtifact& a) {
    const DispatchSolution& d = a.solution;
    Json j;
    j["case_sha256"] = a.case_sha256;
    j["prices_sha256"] = a.prices_sha256;
    j["config"] = config_to_json(a.config);
    j["scenarios"] = {{"seed", a.scenario_seed},
                      {"num_samples", a.num_scenarios},
                      {"forecast", matrix_to_json(a.forecast)},
                      {"sigma", matrix_to_json(a.sigma)}};
    j["status"] = d.status;
    j["converged"] = d.converged;
    j["iterations"] = d.iterations;
    j["objective"] = d.objective;
    j["generation_cost"] = d.generation_cost;
    j["utility"] = d.utility;
    j["cvar_term"] = d.cvar_term;
    j["eta"] = d.eta;
    j["u"] = vector_json(d.u);
    j["kkt"] = {{"stationarity", d.kkt.stationarity},
                {"primal_eq", d.kkt.primal_eq},
                {"primal_in", d.kkt.primal_in},
                {"complementarity", d.kkt.complementarity}};
    j["p_gen"] = matrix_to_json(d.p_gen);
    j["p_wind"] = matrix_to_json(d.p_wind);
    j["p_dra"] = matrix_to_json(d.p_dra);
    j["theta"] = matrix_to_json(d.theta);
    j["tau"] = matrix_to_json(d.tau);
    j["lambda"] = matrix_to_json(d.lambda);
    j["appliance"] = d.appliance;
    j["trace"] = Json::array();
    for (const auto& r : d.trace)
        j["trace"].push_back({{"iteration", r.iteration},
                              {"objective", r.objective},
                              {"primal_residual", r.primal_residual},
                              {"dual_residual", r.dual_residual}});
    return j;
}

SolutionArtifact solution_from_json(const Json& j) {
    SolutionArtifact a;
    DispatchSolution& d = a.solution;
    auto str = [&](const char* key) {
        const Json& v = field(j, key, "");
        if (!v.is_string()) bad(key, "expected a string");
        return v.get<std::string>();
    };
    a.case_sha256 = str("case_sha256");
    a.prices_sha256 = str("prices_sha256");
    a.config = config_from_json(field(j, "config", ""), "config");
    const Json& sc = field(j, "scenarios", "");
    const Json& seed = field(sc, "seed", "scenarios");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0))
        bad("scenarios.seed", "expected a non-negative integer");
    a.scenario_seed = seed.get<std::uint64_t>();
    a.num_scenarios = int_field(sc, "num_samples", "scenarios");
    a.forecast = mat_field(sc, "forecast", "scenarios");
    a.sigma = mat_field(sc, "sigma", "scenarios");
    d.status = str("status");
    const Json& conv = field(j, "converged", "");
    if (!conv.is_boolean()) bad("converged", "expected true or false");
    d.converged = conv.get<bool>();
    d.iterations = int_field(j, "iterations", "");
    d.objective = num_field(j, "objective", "");
    d.generation_cost = num_field(j, "generation_cost", "");
    d.utility = num_field(j, "utility", "");
    d.cvar_term = num_field(j, "cvar_term", "");
    d.eta = num_field(j, "eta", "");
    d.u = vector_from(field(j, "u", ""), "u");
    const Json& kkt = field(j, "kkt", "");
    d.kkt.stationarity = num_field(kkt, "stationarity", "kkt");
    d.kkt.primal_eq = num_field(kkt, "primal_eq", "kkt");
    d.kkt.primal_in = num_field(kkt, "primal_in", "kkt");
    d.kkt.complementarity = num_field(kkt, "complementarity", "kkt");
    const int T = static_cast<int>(array(field(j, "theta", ""), "theta").size());
    auto mat = [&](const char* key) {
        Eigen::MatrixXd m = mat_field(j, key, "");
        if (m.size() == 0) m.resize(T, 0);
        return m;
    };
    d.p_gen = mat("p_gen");
    d.p_wind = mat("p_wind");
    d.p_dra = mat("p_dra");
    d.theta = mat("theta");
    d.tau = mat("tau");
    d.lambda = mat("lambda");
    const Json& ap = array(field(j, "appliance", ""), "appliance");
    for (std::size_t a2 = 0; a2 < ap.size(); ++a2) {
        const std::string pa = at("appliance", a2);
        std::vector<std::vector<double>> per;
        for (std::size_t k = 0; k < array(ap[a2], pa).size(); ++k) per.push_back(numbers(ap[a2][k], at(pa, k)));
        d.appliance.push_back(std::move(per));
    }
    const Json& trace = array(field(j, "trace", ""), "trace");
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const std::string p = at("trace", i);
        TraceRow r;
        r.iteration = int_field(trace[i], "iteration", p);
        r.objective = num_field(trace[i], "objective", p);
        r.primal_residual = num_field(trace[i], "primal_residual", p);
        r.dual_residual = num_field(trace[i], "dual_residual", p);
        d.trace.push_back(r);
    }
    return a;
}

// ---------------------------------------------------------------------------
// reports

Json settlement_to_json(const SettlementReport& r) {
    Json j;
    auto rows = [](const Eigen::VectorXd& v, const std::vector<int>& bus, const char* what) {
        Json a = Json::array();
        for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back({{"index", i + 1}, {"bus", bus[i]}, {what, v[i]}});
        return a;
    };
    j["generators"] = rows(r.generator, r.generator_bus, "revenue");
    j["aggregators"] = rows(r.aggregator, r.aggregator_bus, "payment");
    j["wind_farms"] = rows(r.wind, r.wind_bus, "revenue");
    j["inputs"] = {{"generator_bus", r.generator_bus},
                   {"aggregator_bus", r.aggregator_bus},
                   {"wind_bus", r.wind_bus},
                   {"da_tau", matrix_to_json(r.da_tau)},
                   {"rt_tau", matrix_to_json(r.rt_tau)},
                   {"da_p_gen", matrix_to_json(r.da_p_gen)},
                   {"rt_p_gen", matrix_to_json(r.rt_p_gen)},
                   {"da_p_dra", matrix_to_json(r.da_p_dra)},
                   {"rt_p_dra", matrix_to_json(r.rt_p_dra)},
                   {"da_p_wind", matrix_to_json(r.da_p_wind)},
                   {"realized_wind", matrix_to_json(r.realized_wind)},
                   {"purchase", matrix_to_json(r.purchase)},
                   {"sell", matrix_to_json(r.sell)}};
    return j;
}

SettlementReport settlement_from_json(const Json& j) {
    SettlementReport r;
    const Json& in = field(j, "inputs", "");
    auto ints = [&](const char* key) {
        std::vector<int> out;
        const Json& a = array(field(in, key, "inputs"), join("inputs", key));
        for (std::size_t i = 0; i < a.size(); ++i) out.push_back(integer(a[i], at(join("inputs", key), i)));
        return out;
    };
    r.generator_bus = ints("generator_bus");
    r.aggregator_bus = ints("aggregator_bus");
    r.wind_bus = ints("wind_bus");
    r.da_tau = mat_field(in, "da_tau", "inputs");
    const Eigen::Index T = r.da_tau.rows();
    auto mat = [&](const char* key) {
        Eigen::MatrixXd m = mat_field(in, key, "inputs");
        if (m.size() == 0) m.resize(T, 0);
        return m;
    };
    r.rt_tau = mat("rt_tau");
    r.da_p_gen = mat("da_p_gen");
    r.rt_p_gen = mat("rt_p_gen");
    r.da_p_dra = mat("da_p_dra");
    r.rt_p_dra = mat("rt_p_dra");
    r.da_p_wind = mat("da_p_wind");
    r.realized_wind = mat("realized_wind");
    r.purchase = mat("purchase");
    r.sell = mat("sell");
    auto amounts = [&](const char* list, const char* key) {
        const Json& a = array(field(j, list, ""), list);
        Eigen::VectorXd v(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) v[i] = num_field(a[i], key, at(list, i));
        return v;
    };
    r.generator = amounts("generators", "revenue");
    r.aggregator = amounts("aggregators", "payment");
    r.wind = amounts("wind_farms", "revenue");
    return r;
}

Json distribution_summary(const CostDistribution& d) {
    const auto [lo, hi] = std::minmax_element(d.samples.begin(), d.samples.end());
    return {{"policy", to_string(d.policy)},
            {"samples", d.samples.size()},
            {"generation_cost", d.generation_cost},
            {"utility", d.utility},
            {"mean", d.mean},
            {"std", d.stddev},
            {"min", d.samples.empty() ? 0.0 : *lo},
            {"q25", d.q25},
            {"q50", d.q50},
            {"q75", d.q75},
            {"max", d.samples.empty() ? 0.0 : *hi}};
}

Json sweep_to_json(const std::vector<MuSweepRow>& rows) {
    Json a = Json::array();
    for (const auto& r : rows)
        a.push_back({{"mu", r.mu},
                     {"ok", r.ok},
                     {"status", r.status},
                     {"generation_cost", r.generation_cost},
                     {"cvar_term", r.cvar_term},
                     {"utility", r.utility},
                     {"objective", r.objective},
                     {"wind_committed", r.wind_committed},
                     {"iterations", r.iterations}});
    return a;
}

// ---------------------------------------------------------------------------
// CSV

std::string matrix_csv(const Eigen::MatrixXd& m, const std::string& prefix) {
    std::string out = "slot";
    for (Eigen::Index c = 0; c < m.cols(); ++c) out += "," + prefix + std::to_string(c + 1);
    out += "\n";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        out += std::to_string(r + 1);
        for (Eigen::Index c = 0; c < m.cols(); ++c) out += "," + format_double(m(r, c));
        out += "\n";
    }
    return out;
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
    std::string out = "iteration,objective,primal_residual,dual_residual\n";
    for (const auto& r : trace)
        out += std::to_string(r.iteration) + "," + format_double(r.objective) + "," + format_double(r.primal_residual) +
               "," + format_double(r.dual_residual) + "\n";
    return out;
}

std::string settlement_csv(const SettlementReport& r) {
    std::string out = "participant,index,bus,amount\n";
    auto rows = [&](const char* kind, const Eigen::VectorXd& v, const std::vector<int>& bus) {
        for (Eigen::Index i = 0; i < v.size(); ++i)
            out += std::string(kind) + "," + std::to_string(i + 1) + "," + std::to_string(bus[i]) + "," +
                   format_double(v[i]) + "\n";
    };
    rows("generator", r.generator, r.generator_bus);
    rows("aggregator", r.aggregator, r.aggregator_bus);
    rows("wind_farm", r.wind, r.wind_bus);
    return out;
}

std::string cdf_csv(const std::vector<CostDistribution>& dists) {
    std::string out = "policy,cost,probability\n";
    for (const auto& d : dists)
        for (const auto& p : d.cdf)
            out += to_string(d.policy) + "," + format_double(p.cost) + "," + format_double(p.probability) + "\n";
    return out;
}

std::string sweep_csv(const std::vector<MuSweepRow>& rows) {
    std::string out = "mu,ok,generation_cost,cvar_term,utility,objective,wind_committed,iterations\n";
    for (const auto& r : rows)
        out += format_double(r.mu) + "," + (r.ok ? "1" : "0") + "," + format_double(r.generation_cost) + "," +
               format_double(r.cvar_term) + "," + format_double(r.utility) + "," + format_double(r.objective) + "," +
               format_double(r.wind_committed) + "," + std::to_string(r.iterations) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// files

NetworkCase load_case(const fs::path& path) { return with_source(path, case_from_json); }
PriceSchedule load_prices(const fs::path& path) { return with_source(path, prices_from_json); }
ScenarioSet load_scenarios(const fs::path& path) { return with_source(path, scenarios_from_json); }
SolutionArtifact load_solution(const fs::path& path) { return with_source(path, solution_from_json); }

Eigen::MatrixXd load_forecast(const fs::path& path) {
    return with_source(path, [](const Json& j) { return mat_field(j, "forecast", ""); });
}

Json RunManifest::to_json(const fs::path& out_dir) const {
    Json j;
    j["command"] = command;
    j["parameters"] = parameters;
    j["seeds"] = seeds;
    j["inputs"] = Json::array();
    for (const auto& [role, path] : inputs)
        j["inputs"].push_back({{"role", role}, {"path", path.generic_string()}, {"sha256", file_sha256(path)}});
    j["artifacts"] = Json::array();
    for (const auto& a : artifacts) j["artifacts"].push_back({{"path", a}, {"sha256", file_sha256(out_dir / a)}});
    return j;
}

}  // namespace smc
