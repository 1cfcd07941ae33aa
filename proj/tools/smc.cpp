// smc: command-line front end for the market-clearing engine.
//
// exit codes: 0 ok, 1 invalid input or arguments, 2 file or format error,
// 3 solver failure

#include "smc/bundle.hpp"
#include "smc/evaluation.hpp"
#include "smc/io.hpp"
#include "smc/pricing.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <thread>

using namespace smc;
namespace fs = std::filesystem;

namespace {

enum Exit { ok = 0, invalid = 1, io_failure = 2, solver_failure = 3 };

struct SolverFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

fs::path default_out() {
    const char* env = std::getenv("SMC_OUTPUT_DIR");
    return env && *env ? fs::path(env) : fs::path("smc-out");
}

// artifact directory with its manifest
struct Outputs {
    fs::path dir;
    RunManifest manifest;
    Json timings = Json::object();

    void write(const std::string& name, const std::string& content) {
        write_file(dir / name, content);
        manifest.artifacts.push_back(name);
    }
    void finish() {
        write_file(dir / "manifest.json", dump_json(manifest.to_json(dir)));
        write_file(dir / "timings.json", dump_json(timings));
    }
};

// options shared by clear and sweep-mu
struct ClearOptions {
    std::string case_file, prices_file, scenarios_file, forecast_file;
    std::string mode = "central";
    int samples = 200;
    std::uint64_t seed = 1;
    double sigma_fraction = 0.2, sigma_floor = 0.5;
    ClearingConfig config;
    fs::path out;

    void add(CLI::App* app) {
        app->add_option("--case", case_file, "network case (JSON)")->required();
        app->add_option("--prices", prices_file, "real-time purchase/sell prices (JSON)")->required();
        app->add_option("--scenarios", scenarios_file, "wind scenario set (JSON)");
        app->add_option("--forecast", forecast_file, "draw scenarios around this forecast instead");
        app->add_option("--samples", samples, "scenarios to draw with --forecast")->capture_default_str();
        app->add_option("--seed", seed, "scenario seed with --forecast")->capture_default_str();
        app->add_option("--sigma-fraction", sigma_fraction, "noise scale as a fraction of the forecast")
            ->capture_default_str();
        app->add_option("--sigma-floor", sigma_floor, "noise scale floor, MW")->capture_default_str();
        app->add_option("--mode", mode, "central or admm")
            ->check(CLI::IsMember({"central", "admm"}))
            ->capture_default_str();
        app->add_option("--beta", config.risk.beta, "CVaR probability level")->capture_default_str();
        app->add_option("--mu", config.risk.mu, "risk weight")->capture_default_str();
        app->add_option("--rho", config.rho, "ADMM penalty")->capture_default_str();
        app->add_option("--eps-pri", config.eps_pri, "ADMM primal tolerance, MW")->capture_default_str();
        app->add_option("--max-iter", config.max_admm_iter, "ADMM iteration cap")->capture_default_str();
        app->add_option("--qp-tol", config.qp.tol, "QP optimality tolerance")->capture_default_str();
        app->add_option("--out", out, "output directory (default $SMC_OUTPUT_DIR or ./smc-out)");
        app->callback([this] {
            config.mode = parse_mode(mode);
            if (scenarios_file.empty() == forecast_file.empty())
                throw CLI::ValidationError("give exactly one of --scenarios and --forecast");
            if (samples < 1) throw CLI::ValidationError("--samples must be at least 1");
            try {
                config.validate();
            } catch (const std::invalid_argument& e) {
                throw CLI::ValidationError(e.what());
            }
        });
    }

    Json parameters() const {
        Json p = config_to_json(config);
        if (!forecast_file.empty()) {
            p["samples"] = samples;
            p["sigma_fraction"] = sigma_fraction;
            p["sigma_floor"] = sigma_floor;
        }
        return p;
    }
};

struct Inputs {
    NetworkCase network;
    PriceSchedule prices;
    ScenarioSet scenarios;
};

void require_valid_case(const NetworkCase& nc, const std::string& file) {
    const auto violations = validate_case(nc);
    if (violations.empty()) return;
    std::ostringstream msg;
    msg << file << ": " << violations.size() << " violation(s)";
    for (const auto& v : violations) msg << "\n  " << v.path << ": " << v.message;
    throw std::invalid_argument(msg.str());
}

void require_price_dims(const NetworkCase& nc, const PriceSchedule& p) {
    if (p.horizon() != nc.horizon || p.num_wind() != nc.num_wind())
        throw std::invalid_argument("prices are " + std::to_string(p.horizon()) + "x" + std::to_string(p.num_wind()) +
                                    ", case needs " + std::to_string(nc.horizon) + "x" + std::to_string(nc.num_wind()));
}

Inputs load_inputs(const ClearOptions& o, int threads, RunManifest& m) {
    Inputs in;
    in.network = load_case(o.case_file);
    require_valid_case(in.network, o.case_file);
    in.prices = load_prices(o.prices_file);
    require_price_dims(in.network, in.prices);
    m.inputs = {{"case", o.case_file}, {"prices", o.prices_file}};
    if (!o.scenarios_file.empty()) {
        in.scenarios = load_scenarios(o.scenarios_file);
        m.inputs.push_back({"scenarios", o.scenarios_file});
    } else {
        const Eigen::MatrixXd f = load_forecast(o.forecast_file);
        in.scenarios = generate_scenarios(f, default_sigma(f, o.sigma_fraction, o.sigma_floor), o.samples, o.seed, threads);
        m.inputs.push_back({"forecast", o.forecast_file});
        m.seeds["scenarios"] = o.seed;
    }
    check_scenarios(in.scenarios);
    check_scenario_dims(in.scenarios, in.network.horizon, in.network.num_wind());
    return in;
}

// ---------------------------------------------------------------------------

int cmd_validate(const std::string& case_file) {
    const NetworkCase nc = load_case(case_file);
    const auto violations = validate_case(nc);
    if (violations.empty()) {
        std::cout << case_file << ": ok (" << nc.num_buses() << " buses, " << nc.num_generators() << " generators, "
                  << nc.num_wind() << " wind farms, " << nc.num_aggregators() << " aggregators, "
                  << nc.num_appliances() << " appliances, T = " << nc.horizon << ")\n";
        return ok;
    }
    for (const auto& v : violations) std::cout << v.path << ": " << v.message << "\n";
    std::cout << violations.size() << " violation(s)\n";
    return invalid;
}

int cmd_clear(const ClearOptions& o, int threads) {
    Outputs out{o.out.empty() ? default_out() : o.out, {}, {}};
    out.manifest.command = "clear";
    out.manifest.parameters = o.parameters();
    auto t0 = Clock::now();
    const Inputs in = load_inputs(o, threads, out.manifest);
    out.timings["load_ms"] = ms_since(t0);

    ClearingConfig cfg = o.config;
    cfg.threads = threads;
    t0 = Clock::now();
    const DispatchSolution d = clear_market(in.network, in.prices, in.scenarios, cfg);
    out.timings["solve_ms"] = ms_since(t0);
    out.timings["threads"] = threads;
    Json wall = Json::array();
    for (const auto& r : d.trace) wall.push_back(r.wall_ms);
    out.timings["trace_wall_ms"] = wall;

    SolutionArtifact a;
    a.solution = d;
    a.case_sha256 = file_sha256(o.case_file);
    a.prices_sha256 = file_sha256(o.prices_file);
    a.config = o.config;
    a.forecast = in.scenarios.forecast;
    a.sigma = in.scenarios.sigma.size() > 0 ? in.scenarios.sigma
                                            : default_sigma(in.scenarios.forecast, o.sigma_fraction, o.sigma_floor);
    a.scenario_seed = in.scenarios.seed;
    a.num_scenarios = in.scenarios.num_samples();
    out.write("solution.json", dump_json(solution_to_json(a)));
    out.write("p_gen.csv", matrix_csv(d.p_gen, "gen"));
    out.write("p_wind.csv", matrix_csv(d.p_wind, "wind"));
    out.write("p_dra.csv", matrix_csv(d.p_dra, "aggregator"));
    out.write("theta.csv", matrix_csv(d.theta, "bus"));
    out.write("tau.csv", matrix_csv(d.tau, "bus"));
    out.write("lambda.csv", matrix_csv(d.lambda, "aggregator"));
    out.write("trace.csv", trace_csv(d.trace));
    out.finish();

    std::cout << "mode " << to_string(o.config.mode) << ", status " << d.status << ", iterations " << d.iterations
              << "\nobjective " << format_double(d.objective) << " (generation " << format_double(d.generation_cost)
              << ", utility " << format_double(d.utility) << ", cvar " << format_double(d.cvar_term) << ")\n"
              << "wrote " << out.dir.string() << "\n";
    if (!d.converged) throw SolverFailure("ADMM stopped at the iteration cap without reaching eps_pri");
    return ok;
}

struct EvaluateOptions {
    std::string case_file, prices_file, solution_file;
    std::vector<std::string> policies = {"cvar_risk_limiting", "expected_wind", "no_wind"};
    int samples = 10000;
    std::uint64_t seed = 7;
    fs::path out;
};

void require_digest(const std::string& file, const std::string& expected, const char* what) {
    const std::string got = file_sha256(file);
    if (got != expected)
        throw std::invalid_argument(std::string(what) + " " + file + " does not match the one the solution was cleared on (sha256 " +
                                    got.substr(0, 12) + "..., expected " + expected.substr(0, 12) + "...)");
}

int cmd_evaluate(const EvaluateOptions& o, int threads) {
    Outputs out{o.out.empty() ? default_out() : o.out, {}, {}};
    out.manifest.command = "evaluate";
    out.manifest.parameters = {{"policies", o.policies}, {"samples", o.samples}};
    out.manifest.seeds["evaluation"] = o.seed;
    out.manifest.inputs = {{"case", o.case_file}, {"prices", o.prices_file}, {"solution", o.solution_file}};
    std::vector<PolicyKind> kinds;
    for (const auto& p : o.policies) kinds.push_back(parse_policy(p));

    const SolutionArtifact art = load_solution(o.solution_file);
    require_digest(o.case_file, art.case_sha256, "case");
    require_digest(o.prices_file, art.prices_sha256, "prices");
    const NetworkCase nc = load_case(o.case_file);
    require_valid_case(nc, o.case_file);
    const PriceSchedule prices = load_prices(o.prices_file);

    auto t0 = Clock::now();
    const ScenarioSet eval = generate_scenarios(art.forecast, art.sigma, o.samples, o.seed, threads);
    out.timings["scenarios_ms"] = ms_since(t0);

    ScenarioSet forecast_only;
    forecast_only.forecast = art.forecast;
    std::vector<CostDistribution> dists;
    Json summary = Json::array();
    for (PolicyKind k : kinds) {
        t0 = Clock::now();
        PolicySpec spec{k, art.config};
        const DispatchSolution d =
            k == PolicyKind::cvar_risk_limiting ? art.solution : dispatch_policy(spec, nc, prices, forecast_only);
        dists.push_back(evaluate_policy(k, d, prices, eval, threads));
        summary.push_back(distribution_summary(dists.back()));
        out.timings[to_string(k) + "_ms"] = ms_since(t0);
    }
    out.timings["threads"] = threads;

    std::string csv = "policy,samples,mean,std,q25,q50,q75\n";
    for (const auto& d : dists)
        csv += to_string(d.policy) + "," + std::to_string(d.samples.size()) + "," + format_double(d.mean) + "," +
               format_double(d.stddev) + "," + format_double(d.q25) + "," + format_double(d.q50) + "," +
               format_double(d.q75) + "\n";
    out.write("summary.json", dump_json(Json{{"samples", o.samples}, {"seed", o.seed}, {"policies", summary}}));
    out.write("summary.csv", csv);
    out.write("cdf.csv", cdf_csv(dists));
    out.finish();
    std::cout << csv << "wrote " << out.dir.string() << "\n";
    return ok;
}

int cmd_sweep(const ClearOptions& o, const std::vector<double>& grid, int threads) {
    Outputs out{o.out.empty() ? default_out() : o.out, {}, {}};
    out.manifest.command = "sweep-mu";
    out.manifest.parameters = o.parameters();
    out.manifest.parameters["mu_grid"] = grid;
    out.manifest.parameters.erase("mu");
    const Inputs in = load_inputs(o, threads, out.manifest);
    ClearingConfig cfg = o.config;
    cfg.threads = threads;
    auto t0 = Clock::now();
    const auto rows = mu_sweep(in.network, in.prices, in.scenarios, grid, cfg);
    out.timings["sweep_ms"] = ms_since(t0);
    out.timings["threads"] = threads;
    out.write("sweep.json", dump_json(sweep_to_json(rows)));
    out.write("sweep.csv", sweep_csv(rows));
    out.finish();
    std::cout << sweep_csv(rows) << "wrote " << out.dir.string() << "\n";
    for (const auto& r : rows)
        if (!r.ok) throw SolverFailure("mu = " + format_double(r.mu) + ": " + r.status);
    return ok;
}

struct SettleOptions {
    std::string case_file, prices_file, solution_file, realized_file, rt_prices_file;
    fs::path out;
};

int cmd_settle(const SettleOptions& o) {
    Outputs out{o.out.empty() ? default_out() : o.out, {}, {}};
    out.manifest.command = "settle";
    out.manifest.inputs = {{"case", o.case_file}, {"prices", o.prices_file}, {"solution", o.solution_file}};
    const SolutionArtifact art = load_solution(o.solution_file);
    require_digest(o.case_file, art.case_sha256, "case");
    require_digest(o.prices_file, art.prices_sha256, "prices");
    const NetworkCase nc = load_case(o.case_file);
    const PriceSchedule prices = load_prices(o.prices_file);
    Eigen::MatrixXd realized = art.forecast;
    if (!o.realized_file.empty()) {
        realized = load_forecast(o.realized_file);
        out.manifest.inputs.push_back({"realized_wind", o.realized_file});
    }
    Eigen::MatrixXd rt_tau = art.solution.tau;
    if (!o.rt_prices_file.empty()) {
        const Json j = parse_json(read_file(o.rt_prices_file), o.rt_prices_file);
        if (!j.is_object() || !j.contains("tau")) throw FormatError(o.rt_prices_file + ": tau: missing");
        rt_tau = matrix_from_json(j.at("tau"), "tau");
        out.manifest.inputs.push_back({"rt_prices", o.rt_prices_file});
    }
    const auto report = settle(nc, art.solution, rt_tau, realized, prices);
    out.write("settlement.json", dump_json(settlement_to_json(report)));
    out.write("settlement.csv", settlement_csv(report));
    out.finish();
    std::cout << settlement_csv(report) << "wrote " << out.dir.string() << "\n";
    return ok;
}

int cmd_generate(const std::string& forecast_file, int samples, std::uint64_t seed, double fraction, double floor_mw,
                 const std::string& out_file, int threads) {
    const Eigen::MatrixXd f = load_forecast(forecast_file);
    const auto set = generate_scenarios(f, default_sigma(f, fraction, floor_mw), samples, seed, threads);
    write_file(out_file, dump_json(scenarios_to_json(set)));
    std::cout << "wrote " << samples << " scenarios to " << out_file << "\n";
    return ok;
}

int cmd_make_example(const BundleOptions& opt, int samples, std::uint64_t seed, const fs::path& dir, int threads) {
    const NetworkCase nc = make_wecc6_case(opt);
    const Eigen::MatrixXd f = make_wecc6_forecast(opt);
    write_file(dir / "case.json", dump_json(case_to_json(nc)));
    write_file(dir / "prices.json", dump_json(prices_to_json(make_wecc6_prices(opt))));
    write_file(dir / "forecast.json", dump_json(Json{{"forecast", matrix_to_json(f)}}));
    write_file(dir / "scenarios.json",
               dump_json(scenarios_to_json(generate_scenarios(f, default_sigma(f), samples, seed, threads))));
    std::cout << "wrote case.json, prices.json, forecast.json, scenarios.json to " << dir.string() << "\n";
    return ok;
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
        if (used == 0 || used != item.size()) throw CLI::ValidationError("--mu-grid", "'" + item + "' is not a number");
        grid.push_back(v);
    }
    if (grid.empty()) throw CLI::ValidationError("--mu-grid", "empty grid");
    return grid;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic day-ahead market clearing with CVaR wind commitment"};
    app.require_subcommand(1);
    int threads = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--threads", threads, "worker threads for parallel sections")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    std::string validate_file;
    auto* validate = app.add_subcommand("validate", "check a case file");
    validate->add_option("case", validate_file, "network case (JSON)")->required();

    ClearOptions clear_opts;
    auto* clear = app.add_subcommand("clear", "clear the day-ahead market");
    clear_opts.add(clear);

    ClearOptions sweep_opts;
    std::string grid_text = "0.5,1,2,4,8";
    std::vector<double> grid;
    auto* sweep = app.add_subcommand("sweep-mu", "clear once per risk weight");
    sweep_opts.add(sweep);
    sweep->add_option("--mu-grid", grid_text, "comma-separated ascending weights")->capture_default_str();
    sweep->parse_complete_callback([&] { grid = parse_grid(grid_text); });

    EvaluateOptions eval_opts;
    std::string policies_text;
    auto* evaluate = app.add_subcommand("evaluate", "Monte Carlo cost of the cleared and baseline policies");
    evaluate->add_option("--case", eval_opts.case_file)->required();
    evaluate->add_option("--prices", eval_opts.prices_file)->required();
    evaluate->add_option("--solution", eval_opts.solution_file, "solution.json from clear")->required();
    evaluate->add_option("--policies", policies_text, "comma-separated; default all three");
    evaluate->add_option("--samples", eval_opts.samples)->check(CLI::PositiveNumber)->capture_default_str();
    evaluate->add_option("--seed", eval_opts.seed)->capture_default_str();
    evaluate->add_option("--out", eval_opts.out);
    evaluate->parse_complete_callback([&] {
        if (policies_text.empty()) return;
        eval_opts.policies.clear();
        std::stringstream ss(policies_text);
        std::string p;
        while (std::getline(ss, p, ',')) {
            try {
                eval_opts.policies.push_back(to_string(parse_policy(p)));
            } catch (const std::invalid_argument& e) {
                throw CLI::ValidationError("--policies", e.what());
            }
        }
    });

    SettleOptions settle_opts;
    auto* settle_cmd = app.add_subcommand("settle", "two-settlement payments for a cleared solution");
    settle_cmd->add_option("--case", settle_opts.case_file)->required();
    settle_cmd->add_option("--prices", settle_opts.prices_file)->required();
    settle_cmd->add_option("--solution", settle_opts.solution_file)->required();
    settle_cmd->add_option("--realized", settle_opts.realized_file, "realized wind {\"forecast\": T x N_w}; default forecast");
    settle_cmd->add_option("--rt-prices", settle_opts.rt_prices_file, "real-time prices {\"tau\": T x N_b}; default day-ahead");
    settle_cmd->add_option("--out", settle_opts.out);

    std::string gen_forecast, gen_out;
    int gen_samples = 200;
    std::uint64_t gen_seed = 1;
    double gen_fraction = 0.2, gen_floor = 0.5;
    auto* gen = app.add_subcommand("generate-scenarios", "draw wind scenarios around a forecast");
    gen->add_option("--forecast", gen_forecast, "any JSON document with a forecast matrix")->required();
    gen->add_option("--samples", gen_samples)->check(CLI::PositiveNumber)->capture_default_str();
    gen->add_option("--seed", gen_seed)->capture_default_str();
    gen->add_option("--sigma-fraction", gen_fraction)->check(CLI::NonNegativeNumber)->capture_default_str();
    gen->add_option("--sigma-floor", gen_floor)->check(CLI::NonNegativeNumber)->capture_default_str();
    gen->add_option("--out", gen_out)->required();

    BundleOptions bundle;
    int ex_samples = 200;
    std::uint64_t ex_seed = 1;
    fs::path ex_dir;
    auto* example = app.add_subcommand("make-example", "write the 6-bus example bundle");
    example->add_option("--users", bundle.users_per_aggregator, "PHEV owners per aggregator")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    example->add_option("--appliance-seed", bundle.appliance_seed)->capture_default_str();
    example->add_option("--samples", ex_samples)->check(CLI::PositiveNumber)->capture_default_str();
    example->add_option("--seed", ex_seed, "scenario seed")->capture_default_str();
    example->add_option("--out", ex_dir)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : invalid;
    }

    try {
        if (*validate) return cmd_validate(validate_file);
        if (*clear) return cmd_clear(clear_opts, threads);
        if (*sweep) return cmd_sweep(sweep_opts, grid, threads);
        if (*evaluate) return cmd_evaluate(eval_opts, threads);
        if (*settle_cmd) return cmd_settle(settle_opts);
        if (*gen) return cmd_generate(gen_forecast, gen_samples, gen_seed, gen_fraction, gen_floor, gen_out, threads);
        if (*example) return cmd_make_example(bundle, ex_samples, ex_seed, ex_dir, threads);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return io_failure;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return io_failure;
    } catch (const ClearingError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return solver_failure;
    } catch (const SolverFailure& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return solver_failure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return invalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return solver_failure;
    }
    return invalid;
}
