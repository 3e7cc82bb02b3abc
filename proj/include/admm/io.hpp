// Serialization and file formats: JSON documents for graphs, problem
// instances, and experiment configs; CSV traces and comparison tables that
// parse back through the same readers.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "admm/engine.hpp"
#include "admm/network.hpp"
#include "admm/problem.hpp"

namespace admm {

// Config loading problem, carrying the dotted path of the offending field
// ("run.gamma"); empty path for document-level problems.
struct ConfigError : std::runtime_error {
    std::string field;
    ConfigError(std::string field_path, const std::string& message);
};

// Malformed trace/table input, carrying the 1-based line number.
struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_number, const std::string& message);
};

nlohmann::json topology_to_json(const Topology& topo);
Topology topology_from_json(const nlohmann::json& doc);

nlohmann::json problem_to_json(const ProblemSpec& spec);
ProblemSpec problem_from_json(const nlohmann::json& doc);

struct ProblemConfig {
    std::string kind = "quadratic";  // or "logsumexp"
    int dim = 2;
    std::uint64_t seed = 0;
};

struct TopologyConfig {
    // The default benchmark graph is a ring with a few extra chords under a
    // tight degree cap: mixed degrees give the per-neighbor weights something
    // to rebalance, which a plain (degree-regular) ring does not.
    std::string shape = "augmented_ring";  // or "ring"
    int agents = 5;
    int max_degree = 3;
    std::uint64_t seed = 0;
};

struct OutputConfig {
    std::string trace_path = "trace.csv";
    std::string comparison_path = "comparison.csv";
    std::string format = "csv";  // or "json"
};

struct ExperimentConfig {
    int version = 1;
    ProblemConfig problem;
    TopologyConfig topology;
    RunConfig run;
    OutputConfig output;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& doc);
nlohmann::json experiment_config_to_json(const ExperimentConfig& config);
ExperimentConfig load_experiment_config(const std::string& path);

Topology make_topology(const TopologyConfig& config);
ProblemSpec make_problem(const ProblemConfig& config, const CommMatrix& S);

// Trace columns: iter,residual,V,p,E_1..E_N[,d_1_1..d_N_N],wall_s. The V
// cell is empty when the monitor was unavailable; gain columns appear only
// when requested and list zeros off the neighborhoods.
void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace,
                     int agent_count, bool with_gains);
void write_trace_csv_file(const std::string& path,
                          const std::vector<TraceRecord>& trace,
                          int agent_count, bool with_gains);
std::vector<TraceRecord> read_trace_csv(std::istream& in);
std::vector<TraceRecord> read_trace_csv_file(const std::string& path);

nlohmann::json trace_to_json(const std::vector<TraceRecord>& trace,
                             int agent_count, bool with_gains);
void write_trace_json_file(const std::string& path,
                           const std::vector<TraceRecord>& trace,
                           int agent_count, bool with_gains);

void write_comparison_csv(std::ostream& out, const ComparisonTable& table);
void write_comparison_csv_file(const std::string& path,
                               const ComparisonTable& table);
ComparisonTable read_comparison_csv(std::istream& in);
ComparisonTable read_comparison_csv_file(const std::string& path);

// Residual-vs-iteration series. One input: "iter,residual" rows. Several
// inputs: "run,iter,residual" rows tagged with the given labels.
void write_plotdata(std::ostream& out,
                    const std::vector<std::string>& labels,
                    const std::vector<std::vector<TraceRecord>>& traces);
void write_plotdata_file(const std::string& path,
                         const std::vector<std::string>& labels,
                         const std::vector<std::vector<TraceRecord>>& traces);

}  // namespace admm
