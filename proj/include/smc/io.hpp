#pragma once

// File formats: JSON documents for cases, prices, scenarios, solutions and
// reports, CSV mirrors for tables. Matrices are JSON arrays of rows (slot
// major), so a T x 0 matrix is T empty arrays.

#include "smc/clearing.hpp"
#include "smc/evaluation.hpp"
#include "smc/pricing.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>

namespace smc {

using Json = nlohmann::ordered_json;

// File could not be read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Text is not valid JSON, or a field is missing or has the wrong type.
// The message carries a line/column or a field path such as
// "generators[2].p_max".
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::filesystem::path& path);
/// Creates parent directories as needed.
void write_file(const std::filesystem::path& path, const std::string& content);

/// Parses JSON text; FormatError with line and column on a syntax error.
Json parse_json(const std::string& text, const std::string& source = "input");
/// Two-space indented, trailing newline.
std::string dump_json(const Json& j);

std::string sha256_hex(const std::string& bytes);
std::string file_sha256(const std::filesystem::path& path);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

Json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const Json& j, const std::string& path);

// Case:
//   {"horizon", "mva_base",
//    "buses":       [{"id", "base_load": [T]}],
//    "lines":       [{"from", "to", "reactance", "flow_min"?, "flow_max"?}],
//    "generators":  [{"bus", "cost_a", "cost_b", "p_min", "p_max", "ramp_up", "ramp_down", "p_initial"?}],
//    "wind_farms":  [{"bus", "p_commit_max": [T]}],
//    "aggregators": [{"bus", "p_dra_max",
//                     "users": [{"id", "appliances": [{"id", "energy_total", "p_min", "p_max",
//                                                      "t_start", "t_end", "utility_gamma"?, "utility_delta"?}]}]}]}
// Appliances of one user are written together, in order of first appearance.
Json case_to_json(const NetworkCase& network);
NetworkCase case_from_json(const Json& j);

// Prices: {"purchase": T x N_w, "sell": T x N_w}
Json prices_to_json(const PriceSchedule& prices);
PriceSchedule prices_from_json(const Json& j);

// Scenarios: {"seed", "forecast": T x N_w, "sigma"?: T x N_w, "samples": [N_s][T][N_w]}
Json scenarios_to_json(const ScenarioSet& set);
ScenarioSet scenarios_from_json(const Json& j);

// A clearing result together with what is needed to evaluate it later.
struct SolutionArtifact {
    DispatchSolution solution;
    std::string case_sha256;
    std::string prices_sha256;
    ClearingConfig config;
    Eigen::MatrixXd forecast;  // of the SAA scenario set
    Eigen::MatrixXd sigma;
    std::uint64_t scenario_seed = 0;
    int num_scenarios = 0;
};

// Trace wall times are left out so the document depends only on the inputs.
Json solution_to_json(const SolutionArtifact& artifact);
SolutionArtifact solution_from_json(const Json& j);

Json config_to_json(const ClearingConfig& config);
std::string to_string(ClearingMode mode);
ClearingMode parse_mode(const std::string& name);

Json settlement_to_json(const SettlementReport& report);
SettlementReport settlement_from_json(const Json& j);

Json distribution_summary(const CostDistribution& dist);
Json sweep_to_json(const std::vector<MuSweepRow>& rows);

// CSV
/// Header "slot,<prefix>1,...", one row per slot (1-based).
std::string matrix_csv(const Eigen::MatrixXd& m, const std::string& column_prefix);
std::string trace_csv(const std::vector<TraceRow>& trace);
/// participant,index,bus,amount
std::string settlement_csv(const SettlementReport& report);
/// policy,cost,probability
std::string cdf_csv(const std::vector<CostDistribution>& dists);
std::string sweep_csv(const std::vector<MuSweepRow>& rows);

NetworkCase load_case(const std::filesystem::path& path);
PriceSchedule load_prices(const std::filesystem::path& path);
ScenarioSet load_scenarios(const std::filesystem::path& path);
/// Forecast matrix from any document with a "forecast" member.
Eigen::MatrixXd load_forecast(const std::filesystem::path& path);
SolutionArtifact load_solution(const std::filesystem::path& path);

// Provenance of one CLI run. Everything here is a function of the inputs;
// wall times are written separately.
struct RunManifest {
    std::string command;
    Json parameters = Json::object();
    Json seeds = Json::object();
    std::vector<std::pair<std::string, std::filesystem::path>> inputs;  // role, path
    std::vector<std::string> artifacts;  // relative to the output directory

    /// Digests every input and artifact.
    Json to_json(const std::filesystem::path& out_dir) const;
};

}  // namespace smc
