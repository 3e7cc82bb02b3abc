// Synchronous round engine: drives all agents through the two exchange
// phases of every round, routes message snapshots between them, and records
// residuals, energies, and the optional global monitor into a trace.
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "admm/agent.hpp"
#include "admm/network.hpp"
#include "admm/problem.hpp"

namespace admm {

enum class Mode { iterative, exact };
enum class RunStatus { converged, iteration_limit, diverged };

std::string to_string(Mode mode);
std::string to_string(RunStatus status);
Mode mode_from_string(const std::string& s);
RunStatus status_from_string(const std::string& s);

struct RunConfig {
    Mode mode = Mode::iterative;
    bool adaptive = true;
    double tol = 1e-4;
    int max_iter = 30000;
    double alpha = 0.1;
    double w = 1.0;
    // Rebalancing step fraction. Kept small: each adaptation moves weight
    // between two row entries by gamma times the smaller entry, and the run
    // operates near the estimate-recursion stability edge, so large steps can
    // push a row entry below the contraction margin over a long transient.
    double gamma = 0.005;
    std::uint64_t seed = 0;
    int trace_every = 1;   // 0 disables per-round records entirely
    bool trace_gains = false;
    int adapt_every = 1;   // rebalancing cadence once warmed up
    int threads = 1;       // agents per phase may run on several threads

    enum class Beta0 { uniform, random };
    Beta0 beta0 = Beta0::uniform;         // initial raw-weight scheme
    double beta0_min = 0.5;               // range for the random scheme
    double beta0_max = 1.5;

    void validate() const;  // throws std::invalid_argument
};

struct TraceRecord {
    int iteration = 0;
    double residual = 0.0;
    std::optional<double> lyapunov;  // present when the monitor is available
    double objective = 0.0;
    std::vector<double> energy;  // one entry per agent
    // Per-agent (neighbor, gain) pairs; filled only when gains are traced.
    std::vector<std::vector<std::pair<int, double>>> gain_rows;
    double wall_seconds = 0.0;
};

struct RunResult {
    RunStatus status = RunStatus::iteration_limit;
    int iterations = 0;
    double final_residual = 0.0;
    std::vector<Eigen::VectorXd> x;
    std::vector<TraceRecord> trace;
};

// Least-squares multipliers certifying the reference solution: stacked mu
// solving sum_{j in N_i} A_ji^T mu_j = -grad f_i(x_i*) for every i.
struct DualCertificate {
    std::vector<Eigen::VectorXd> mu;
    double residual = 0.0;
    bool valid = false;
};

DualCertificate solve_dual_certificate(const ProblemSpec& spec,
                                       const CommMatrix& S,
                                       const OracleSolution& oracle);

// Multiplier the certificate implies for owner's estimate of target:
// A_{owner,target}^T mu_owner (zero when the block is absent).
Eigen::VectorXd dual_estimate_multiplier(const ConstraintSet& constraints,
                                         const std::vector<Eigen::VectorXd>& mu,
                                         int owner, int target);

class Engine {
  public:
    // Validates the config, the problem, connectivity, and conformity of the
    // coupling blocks with the graph; throws std::invalid_argument otherwise.
    Engine(ProblemSpec spec, CommMatrix S, RunConfig config);

    // Seeded start: x0 uniform in [-5, 5]^n per agent, estimates bootstrapped
    // to the targets' starts, multipliers zero.
    void init_random();
    // Same bootstrap from caller-chosen starting points.
    void init_from_point(const std::vector<Eigen::VectorXd>& x0);
    // Start exactly at the reference primal-dual point.
    void init_from_oracle(const OracleSolution& oracle,
                          const DualCertificate& duals);

    // Runs rounds until the residual drops to tol, the iteration cap is hit,
    // or a non-finite value appears. Calls init_random() first if no init
    // has been done.
    RunResult run();

    // One full round (rebalance if due, both phases, both exchanges).
    void run_round(int k);

    // max over agents of sum_j |x_i - z_ij|_1 over the received estimates.
    double residual() const;
    double objective_value() const;
    // Weighted squared distance to the reference primal-dual point, when the
    // reference and its certificate are available.
    std::optional<double> lyapunov() const;

    int agent_count() const { return static_cast<int>(agents_.size()); }
    const AgentState& agent(int i) const { return agents_.at(i); }
    AgentState& agent_mutable(int i) { return agents_.at(i); }
    int rounds_completed() const { return rounds_; }
    bool has_certificate() const { return certificate_.has_value(); }
    const OracleSolution* oracle() const {
        return oracle_ ? &*oracle_ : nullptr;
    }
    const DualCertificate* certificate() const {
        return certificate_ ? &*certificate_ : nullptr;
    }

    // Processing order of agents within a phase; results must not depend on
    // it, which the tests exercise.
    void set_execution_order(std::vector<int> order);

  private:
    void build_agents(const std::vector<Eigen::VectorXd>& x0,
                      std::mt19937_64& rng);
    void adapt_gains();
    void phase_one();
    void phase_two();
    bool states_finite() const;
    template <typename F>
    void for_each_agent(F&& f);

    ProblemSpec spec_;
    CommMatrix S_;
    RunConfig config_;
    std::vector<AgentState> agents_;
    // Per-recipient first-exchange payloads of the current round.
    std::vector<std::map<int, PhaseOneMessage>> phase1_;
    std::vector<int> order_;
    int rounds_ = 0;
    bool initialized_ = false;
    std::optional<OracleSolution> oracle_;
    std::optional<DualCertificate> certificate_;
};

RunResult run_until_converged(const ProblemSpec& spec, const Topology& topo,
                              const RunConfig& config);

struct ComparisonRow {
    int seed = 0;
    int agents = 0;
    std::string topology;
    int fixed_iters = 0;
    int adaptive_iters = 0;
    double ratio = 0.0;  // adaptive / fixed
    RunStatus status_fixed = RunStatus::iteration_limit;
    RunStatus status_adaptive = RunStatus::iteration_limit;
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;

    double median_ratio() const;
    double mean_fixed() const;
    double mean_adaptive() const;
    bool any_censored() const;  // some run stopped at the iteration cap
};

// Runs both arms from identical starting states for each of n_seeds seeds
// (config.seed + s); the fixed arm freezes the initial gains, the adaptive
// arm rebalances. Traces are suppressed for speed.
ComparisonTable compare_fixed_vs_adaptive(const ProblemSpec& spec,
                                          const CommMatrix& S,
                                          const RunConfig& config, int n_seeds,
                                          const std::string& topology_label);

}  // namespace admm
