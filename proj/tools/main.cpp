// Command-line front end: single runs, fixed-vs-adaptive sweeps over network
// sizes, and plot-ready projections of recorded traces.
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "admm/engine.hpp"
#include "admm/io.hpp"
#include "admm/network.hpp"
#include "admm/problem.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitIterationLimit = 2;
constexpr int kExitDiverged = 3;

// Decorrelates per-cell seeds in a sweep (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t size,
                       std::uint64_t draw) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (size * 1000003ULL + draw + 1ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct Overrides {
    std::string out;
    std::string format;
    std::string adaptive;  // "on" | "off" | ""
};

void apply_overrides(admm::ExperimentConfig& config, const Overrides& ov) {
    if (!ov.format.empty()) config.output.format = ov.format;
    if (ov.adaptive == "on") config.run.adaptive = true;
    if (ov.adaptive == "off") config.run.adaptive = false;
}

int status_exit_code(admm::RunStatus status) {
    switch (status) {
        case admm::RunStatus::converged: return kExitOk;
        case admm::RunStatus::iteration_limit: return kExitIterationLimit;
        case admm::RunStatus::diverged: return kExitDiverged;
    }
    return kExitInvalid;
}

int cmd_run(const std::string& config_path, const Overrides& ov) {
    admm::ExperimentConfig config = admm::load_experiment_config(config_path);
    apply_overrides(config, ov);

    const admm::Topology topo = admm::make_topology(config.topology);
    const admm::CommMatrix S = admm::build_comm_matrix(topo);
    const admm::ProblemSpec problem = admm::make_problem(config.problem, S);

    const admm::RunResult result =
        admm::run_until_converged(problem, topo, config.run);

    const std::string trace_path =
        ov.out.empty() ? config.output.trace_path : ov.out;
    if (config.run.trace_every > 0) {
        if (config.output.format == "json") {
            admm::write_trace_json_file(trace_path, result.trace,
                                        topo.agent_count,
                                        config.run.trace_gains);
        } else {
            admm::write_trace_csv_file(trace_path, result.trace,
                                       topo.agent_count,
                                       config.run.trace_gains);
        }
        std::cout << "trace: " << trace_path << " (" << result.trace.size()
                  << " records)\n";
    }
    std::cout << "status=" << admm::to_string(result.status)
              << " iterations=" << result.iterations
              << " final_residual=" << result.final_residual << '\n';
    return status_exit_code(result.status);
}

int cmd_compare(const std::string& config_path, std::vector<int> sizes,
                int seeds_per_size, const Overrides& ov) {
    admm::ExperimentConfig config = admm::load_experiment_config(config_path);
    apply_overrides(config, ov);
    if (sizes.empty()) sizes.push_back(config.topology.agents);
    for (int size : sizes) {
        if (size < 3) {
            std::cerr << "error: --sizes entries must be >= 3\n";
            return kExitInvalid;
        }
    }
    if (seeds_per_size < 1) {
        std::cerr << "error: --seeds must be >= 1\n";
        return kExitInvalid;
    }

    admm::ComparisonTable table;
    for (int size : sizes) {
        for (int draw = 0; draw < seeds_per_size; ++draw) {
            admm::TopologyConfig tc = config.topology;
            tc.agents = size;
            tc.seed = mix_seed(config.topology.seed, size, draw);
            admm::ProblemConfig pc = config.problem;
            pc.seed = mix_seed(config.problem.seed, size, draw);
            admm::RunConfig rc = config.run;
            rc.seed = mix_seed(config.run.seed, size, draw);
            rc.trace_every = 0;
            try {
                const admm::Topology topo = admm::make_topology(tc);
                const admm::CommMatrix S = admm::build_comm_matrix(topo);
                const admm::ProblemSpec problem = admm::make_problem(pc, S);
                admm::ComparisonTable cell = admm::compare_fixed_vs_adaptive(
                    problem, S, rc, 1, config.topology.shape);
                for (admm::ComparisonRow& row : cell.rows) {
                    row.seed = draw;
                    table.rows.push_back(std::move(row));
                }
            } catch (const std::exception& e) {
                std::cerr << "cell N=" << size << " seed=" << draw
                          << " failed: " << e.what() << '\n';
            }
        }
    }
    if (table.rows.empty()) {
        std::cerr << "error: every sweep cell failed\n";
        return kExitInvalid;
    }

    const std::string out_path =
        ov.out.empty() ? config.output.comparison_path : ov.out;
    admm::write_comparison_csv_file(out_path, table);
    std::cout << "table: " << out_path << " (" << table.rows.size()
              << " rows)\n\n";

    // Per-size summary: mean iterations per arm, median adaptive/fixed ratio.
    std::printf("%6s  %14s  %14s  %12s\n", "N", "mean fixed", "mean adaptive",
                "median ratio");
    for (int size : sizes) {
        admm::ComparisonTable group;
        for (const admm::ComparisonRow& row : table.rows) {
            if (row.agents == size) group.rows.push_back(row);
        }
        if (group.rows.empty()) continue;
        const std::string censored_fixed =
            ">= " + std::to_string(config.run.max_iter);
        bool fixed_capped = false;
        bool adaptive_capped = false;
        for (const admm::ComparisonRow& row : group.rows) {
            fixed_capped |= row.status_fixed != admm::RunStatus::converged;
            adaptive_capped |=
                row.status_adaptive != admm::RunStatus::converged;
        }
        char fixed_cell[32];
        char adaptive_cell[32];
        if (fixed_capped) {
            std::snprintf(fixed_cell, sizeof(fixed_cell), "%s",
                          censored_fixed.c_str());
        } else {
            std::snprintf(fixed_cell, sizeof(fixed_cell), "%.1f",
                          group.mean_fixed());
        }
        if (adaptive_capped) {
            std::snprintf(adaptive_cell, sizeof(adaptive_cell), "%s",
                          censored_fixed.c_str());
        } else {
            std::snprintf(adaptive_cell, sizeof(adaptive_cell), "%.1f",
                          group.mean_adaptive());
        }
        std::printf("%6d  %14s  %14s  %12.4f\n", size, fixed_cell,
                    adaptive_cell, group.median_ratio());
    }
    const double overall = table.median_ratio();
    std::printf("\noverall median ratio (adaptive/fixed): %.4f — %s\n", overall,
                overall < 1.0 ? "adaptive faster"
                              : "no adaptive advantage at these settings");
    return kExitOk;
}

int cmd_plotdata(const std::vector<std::string>& trace_paths,
                 const std::string& out_path) {
    std::vector<std::string> labels;
    std::vector<std::vector<admm::TraceRecord>> traces;
    for (const std::string& path : trace_paths) {
        std::vector<admm::TraceRecord> trace;
        try {
            trace = admm::read_trace_csv_file(path);
        } catch (const admm::ParseError& e) {
            std::cerr << "error: " << path << ": " << e.what() << '\n';
            return kExitInvalid;
        }
        if (trace.empty()) {
            std::cerr << "error: " << path << ": trace has no records\n";
            return kExitInvalid;
        }
        labels.push_back(std::filesystem::path(path).stem().string());
        traces.push_back(std::move(trace));
    }
    admm::write_plotdata_file(out_path, labels, traces);
    std::size_t points = 0;
    for (const auto& t : traces) points += t.size();
    std::cout << "plotdata: " << out_path << " (" << points << " points, "
              << traces.size() << (traces.size() == 1 ? " run" : " runs")
              << ")\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Distributed consensus optimizer with per-neighbor penalty "
        "rebalancing: run experiments, sweep fixed vs adaptive arms, and "
        "export plot data"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<int> sizes;
    int seeds_per_size = 5;
    Overrides ov;
    std::vector<std::string> trace_paths;
    std::string plot_out = "plot.csv";

    CLI::App* run = app.add_subcommand("run", "Run one experiment from a config");
    run->add_option("--config", config_path, "Experiment config (JSON)")
        ->required();
    run->add_option("--out", ov.out, "Trace output path (overrides config)");
    run->add_option("--format", ov.format, "Trace format")
        ->check(CLI::IsMember({"csv", "json"}));
    run->add_option("--adaptive", ov.adaptive,
                    "Force gain rebalancing on or off")
        ->check(CLI::IsMember({"on", "off"}));

    CLI::App* compare = app.add_subcommand(
        "compare", "Sweep network sizes, running fixed and adaptive arms");
    compare->add_option("--config", config_path, "Experiment config (JSON)")
        ->required();
    compare->add_option("--sizes", sizes, "Network sizes to sweep")
        ->delimiter(',');
    compare->add_option("--seeds", seeds_per_size, "Instances per size");
    compare->add_option("--out", ov.out, "Table output path (overrides config)");

    CLI::App* plotdata = app.add_subcommand(
        "plotdata", "Project recorded traces to plot-ready columns");
    plotdata->add_option("traces", trace_paths, "Trace CSV files")
        ->required()
        ->expected(-1);
    plotdata->add_option("--out", plot_out, "Output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, ov);
        if (compare->parsed())
            return cmd_compare(config_path, sizes, seeds_per_size, ov);
        if (plotdata->parsed()) return cmd_plotdata(trace_paths, plot_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
    return kExitInvalid;
}
