#include "admm/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace admm {

std::string to_string(Mode mode) {
    return mode == Mode::iterative ? "iterative" : "exact";
}

std::string to_string(RunStatus status) {
    switch (status) {
        case RunStatus::converged: return "converged";
        case RunStatus::iteration_limit: return "iteration_limit";
        case RunStatus::diverged: return "diverged";
    }
    return "unknown";
}

Mode mode_from_string(const std::string& s) {
    if (s == "iterative") return Mode::iterative;
    if (s == "exact") return Mode::exact;
    throw std::invalid_argument("unknown mode: " + s);
}

RunStatus status_from_string(const std::string& s) {
    if (s == "converged") return RunStatus::converged;
    if (s == "iteration_limit") return RunStatus::iteration_limit;
    if (s == "diverged") return RunStatus::diverged;
    throw std::invalid_argument("unknown run status: " + s);
}

void RunConfig::validate() const {
    if (!(tol > 0.0)) {
        throw std::invalid_argument("config: tol must be positive");
    }
    if (max_iter < 1) {
        throw std::invalid_argument("config: max_iter must be at least 1");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("config: alpha must lie in (0, 1)");
    }
    if (!(w > 0.0)) {
        throw std::invalid_argument("config: w must be positive");
    }
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw std::invalid_argument("config: gamma must lie in (0, 1)");
    }
    if (trace_every < 0) {
        throw std::invalid_argument("config: trace_every must be >= 0");
    }
    if (adapt_every < 1) {
        throw std::invalid_argument("config: adapt_every must be >= 1");
    }
    if (threads < 1) {
        throw std::invalid_argument("config: threads must be >= 1");
    }
    if (beta0 == Beta0::random &&
        !(beta0_min > 0.0 && beta0_max >= beta0_min)) {
        throw std::invalid_argument("config: bad beta0 range");
    }
}

DualCertificate solve_dual_certificate(const ProblemSpec& spec,
                                       const CommMatrix& S,
                                       const OracleSolution& oracle) {
    const int N = spec.agent_count;
    const int n = spec.dim;
    if (static_cast<int>(oracle.x.size()) != N) {
        throw std::invalid_argument("certificate: oracle size mismatch");
    }
    (void)S;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N * n, N * n);
    Eigen::VectorXd rhs(N * n);
    for (int i = 0; i < N; ++i) {
        rhs.segment(i * n, n) = -spec.objectives[i].gradient(oracle.x[i]);
    }
    // Stationarity rows: sum over owners j of A_ji^T mu_j, one row block
    // per agent i.
    for (const auto& [key, block] : spec.constraints.blocks) {
        const auto [j, i] = key;
        M.block(i * n, j * n, n, n) += block.transpose();
    }
    const Eigen::VectorXd mu_flat =
        M.completeOrthogonalDecomposition().solve(rhs);
    DualCertificate cert;
    cert.residual = (M * mu_flat - rhs).norm();
    cert.valid = mu_flat.allFinite() && cert.residual <= 1e-8;
    cert.mu.reserve(N);
    for (int i = 0; i < N; ++i) {
        cert.mu.push_back(mu_flat.segment(i * n, n));
    }
    return cert;
}

Eigen::VectorXd dual_estimate_multiplier(const ConstraintSet& constraints,
                                         const std::vector<Eigen::VectorXd>& mu,
                                         int owner, int target) {
    const Eigen::MatrixXd* A = constraints.block(owner, target);
    if (A == nullptr) return Eigen::VectorXd::Zero(constraints.dim);
    return A->transpose() * mu.at(owner);
}

Engine::Engine(ProblemSpec spec, CommMatrix S, RunConfig config)
    : spec_(std::move(spec)), S_(std::move(S)), config_(config) {
    config_.validate();
    spec_.validate();
    if (spec_.agent_count != S_.agent_count()) {
        throw std::invalid_argument("engine: problem/graph size mismatch");
    }
    if (!check_connected(S_)) {
        throw std::invalid_argument("engine: graph must be connected");
    }
    if (!check_conformity(S_, spec_.constraints)) {
        throw std::invalid_argument(
            "engine: coupling blocks do not conform to the graph");
    }
    if (config_.mode == Mode::exact && !spec_.all_quadratic()) {
        throw std::invalid_argument(
            "engine: exact mode requires quadratic objectives");
    }
    order_.resize(spec_.agent_count);
    std::iota(order_.begin(), order_.end(), 0);
    try {
        oracle_ = oracle_solve(spec_);
        DualCertificate cert = solve_dual_certificate(spec_, S_, *oracle_);
        if (cert.valid) certificate_ = std::move(cert);
    } catch (const OracleIterationLimit&) {
        oracle_.reset();
    } catch (const DegenerateProblem&) {
        oracle_.reset();
    }
}

void Engine::set_execution_order(std::vector<int> order) {
    std::vector<int> check = order;
    std::sort(check.begin(), check.end());
    std::vector<int> expect(agents_.empty() ? spec_.agent_count
                                            : agent_count());
    std::iota(expect.begin(), expect.end(), 0);
    if (check != expect) {
        throw std::invalid_argument("engine: order must be a permutation");
    }
    order_ = std::move(order);
}

void Engine::build_agents(const std::vector<Eigen::VectorXd>& x0,
                          std::mt19937_64& rng) {
    const int N = spec_.agent_count;
    if (static_cast<int>(x0.size()) != N) {
        throw std::invalid_argument("engine: one start per agent required");
    }
    agents_.clear();
    agents_.reserve(N);
    std::uniform_real_distribution<double> beta_draw(config_.beta0_min,
                                                     config_.beta0_max);
    for (int i = 0; i < N; ++i) {
        const std::vector<int>& nbrs = S_.neighbors(i);
        std::vector<double> beta(nbrs.size(), 1.0);
        if (config_.beta0 == RunConfig::Beta0::random) {
            for (double& b : beta) b = beta_draw(rng);
        }
        GainRow row(i, nbrs, beta, config_.gamma);
        std::map<int, Eigen::MatrixXd> coupling;
        for (int j : nbrs) {
            if (const Eigen::MatrixXd* A = spec_.constraints.block(i, j)) {
                coupling[j] = *A;
            }
        }
        agents_.emplace_back(i, spec_.objectives[i], std::move(coupling),
                             std::move(row), config_.alpha, config_.w, x0[i]);
    }
    // Bootstrap exchange: every estimate starts at its target's start and
    // all multipliers start at zero.
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(spec_.dim);
    for (int i = 0; i < N; ++i) {
        for (int t : S_.neighbors(i)) {
            agents_[i].z[t] = x0[t];
            agents_[i].lambda[t] = zero;
        }
        agents_[i].save_previous();
    }
    for (int i = 0; i < N; ++i) {
        for (int j : S_.neighbors(i)) {
            NeighborEstimate est;
            est.z = x0[i];
            est.lambda = zero;
            est.z_residue = zero;
            agents_[i].received[j] = std::move(est);
        }
    }
    phase1_.assign(N, {});
    rounds_ = 0;
    initialized_ = true;
}

void Engine::init_random() {
    std::mt19937_64 rng(config_.seed);
    std::uniform_real_distribution<double> wide(-5.0, 5.0);
    std::vector<Eigen::VectorXd> x0(spec_.agent_count,
                                    Eigen::VectorXd(spec_.dim));
    for (auto& v : x0) {
        for (int c = 0; c < spec_.dim; ++c) v(c) = wide(rng);
    }
    build_agents(x0, rng);
}

void Engine::init_from_point(const std::vector<Eigen::VectorXd>& x0) {
    std::mt19937_64 rng(config_.seed);
    build_agents(x0, rng);
}

void Engine::init_from_oracle(const OracleSolution& oracle,
                              const DualCertificate& duals) {
    if (!duals.valid) {
        throw std::invalid_argument("engine: certificate is not valid");
    }
    std::mt19937_64 rng(config_.seed);
    build_agents(oracle.x, rng);
    for (int i = 0; i < agent_count(); ++i) {
        AgentState& a = agents_[i];
        a.mu = duals.mu.at(i);
        for (int t : S_.neighbors(i)) {
            a.lambda[t] =
                dual_estimate_multiplier(spec_.constraints, duals.mu, i, t);
        }
        a.save_previous();
    }
    for (int i = 0; i < agent_count(); ++i) {
        for (int j : S_.neighbors(i)) {
            agents_[i].received[j].lambda =
                dual_estimate_multiplier(spec_.constraints, duals.mu, j, i);
        }
    }
}

template <typename F>
void Engine::for_each_agent(F&& f) {
    const int nthreads = std::max(1, config_.threads);
    const int N = agent_count();
    if (nthreads == 1 || N == 1) {
        for (int i : order_) f(i);
        return;
    }
    const int chunk = (N + nthreads - 1) / nthreads;
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (int t = 0; t < nthreads; ++t) {
        const int lo = t * chunk;
        const int hi = std::min(N, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            try {
                for (int p = lo; p < hi; ++p) f(order_[p]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

void Engine::adapt_gains() {
    for_each_agent([this](int i) {
        AgentState& a = agents_[i];
        const Eigen::VectorXd grad = a.objective.gradient(a.x);
        std::map<int, Eigen::VectorXd> z_map;
        for (const auto& [j, est] : a.received) z_map[j] = est.z;
        const auto [l, m] = select_extremal_neighbors(grad, a.x, z_map);
        const double h = compute_h(a.x - a.x_prev, a.received.at(l).z_residue,
                                   a.received.at(m).z_residue, a.alpha);
        a.gains.adapt(l, m, h);
    });
}

void Engine::phase_one() {
    std::vector<Eigen::VectorXd> x_new(agent_count());
    for_each_agent([this, &x_new](int i) {
        const AgentState& a = agents_[i];
        x_new[i] = config_.mode == Mode::exact
                       ? a.exact_x_update(a.received)
                       : a.x_update(a.received);
    });
    for (int i = 0; i < agent_count(); ++i) {
        agents_[i].x = std::move(x_new[i]);
    }
    // First exchange: fresh iterates plus the penalty each sender's row
    // currently applies to the recipient.
    for (int i = 0; i < agent_count(); ++i) {
        for (int j : S_.neighbors(i)) {
            PhaseOneMessage& msg = phase1_[i][j];
            msg.sender = j;
            msg.x = agents_[j].x;
            msg.gain_on_recipient = agents_[j].gains.d(i);
        }
    }
}

void Engine::phase_two() {
    for_each_agent([this](int i) {
        AgentState& a = agents_[i];
        const auto& inbox = phase1_[i];
        std::map<int, Eigen::VectorXd> z_new;
        if (config_.mode == Mode::exact) {
            z_new = a.exact_z_update(inbox);
        } else {
            for (int t : S_.neighbors(i)) {
                const PhaseOneMessage& msg = inbox.at(t);
                z_new[t] = a.z_update(t, msg.x, msg.gain_on_recipient);
            }
        }
        Eigen::VectorXd mu_new = a.mu_update(z_new);
        std::map<int, Eigen::VectorXd> lambda_new;
        for (int t : S_.neighbors(i)) {
            const PhaseOneMessage& msg = inbox.at(t);
            lambda_new[t] = a.lambda_update(t, msg.x, z_new.at(t),
                                            msg.gain_on_recipient);
        }
        a.z = std::move(z_new);
        a.mu = std::move(mu_new);
        a.lambda = std::move(lambda_new);
    });
    // Second exchange: updated estimates, their multipliers, and their
    // one-round differences, routed back to the estimates' targets.
    for (int i = 0; i < agent_count(); ++i) {
        for (int j : S_.neighbors(i)) {
            const AgentState& sender = agents_[j];
            NeighborEstimate& est = agents_[i].received[j];
            est.z = sender.z.at(i);
            est.lambda = sender.lambda.at(i);
            est.z_residue = sender.z.at(i) - sender.z_prev.at(i);
        }
    }
}

void Engine::run_round(int k) {
    if (!initialized_) {
        throw std::logic_error("engine: run_round before initialization");
    }
    if (config_.adaptive && k >= 2 && (k - 2) % config_.adapt_every == 0) {
        adapt_gains();
    }
    for (int i = 0; i < agent_count(); ++i) {
        agents_[i].save_previous();
    }
    phase_one();
    phase_two();
    ++rounds_;
    for (auto& a : agents_) ++a.rounds_completed;
}

double Engine::residual() const {
    if (rounds_ < 1) {
        throw std::logic_error("engine: residual needs a completed round");
    }
    double worst = 0.0;
    for (const AgentState& a : agents_) {
        double s = 0.0;
        for (const auto& [j, est] : a.received) {
            s += (a.x - est.z).lpNorm<1>();
        }
        worst = std::max(worst, s);
    }
    return worst;
}

double Engine::objective_value() const {
    double p = 0.0;
    for (const AgentState& a : agents_) p += a.objective.value(a.x);
    return p;
}

std::optional<double> Engine::lyapunov() const {
    if (!oracle_ || !certificate_) return std::nullopt;
    double V = 0.0;
    for (const AgentState& a : agents_) {
        for (const auto& [t, z_est] : a.z) {
            const double d_to = agents_[t].gains.d(a.id);
            V += d_to * (z_est - oracle_->x[t]).squaredNorm();
            const Eigen::VectorXd lam_star = dual_estimate_multiplier(
                spec_.constraints, certificate_->mu, a.id, t);
            V += (a.lambda.at(t) - lam_star).squaredNorm() / d_to;
        }
        V += (a.mu - certificate_->mu[a.id]).squaredNorm() / a.w;
    }
    return V;
}

bool Engine::states_finite() const {
    for (const AgentState& a : agents_) {
        if (!a.x.allFinite() || !a.mu.allFinite()) return false;
        for (const auto& [j, zj] : a.z) {
            if (!zj.allFinite()) return false;
            if (!a.lambda.at(j).allFinite()) return false;
        }
    }
    return true;
}

RunResult Engine::run() {
    if (!initialized_) init_random();
    RunResult result;
    const auto start = std::chrono::steady_clock::now();
    double res = std::numeric_limits<double>::infinity();
    for (int k = 0; k < config_.max_iter; ++k) {
        run_round(k);
        res = residual();
        bool stopping = true;
        if (!std::isfinite(res) || !states_finite()) {
            result.status = RunStatus::diverged;
        } else if (res <= config_.tol) {
            result.status = RunStatus::converged;
        } else if (k + 1 == config_.max_iter) {
            result.status = RunStatus::iteration_limit;
        } else {
            stopping = false;
        }
        const bool record =
            config_.trace_every > 0 &&
            ((k + 1) % config_.trace_every == 0 || stopping);
        if (record) {
            TraceRecord row;
            row.iteration = k + 1;
            row.residual = res;
            row.lyapunov = lyapunov();
            row.objective = objective_value();
            row.energy.reserve(agent_count());
            for (const AgentState& a : agents_) {
                row.energy.push_back(a.local_energy());
            }
            if (config_.trace_gains) {
                row.gain_rows.resize(agent_count());
                for (int i = 0; i < agent_count(); ++i) {
                    for (int j : S_.neighbors(i)) {
                        row.gain_rows[i].emplace_back(j, agents_[i].gains.d(j));
                    }
                }
            }
            row.wall_seconds =
                std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
            result.trace.push_back(std::move(row));
        }
        if (stopping) {
            result.iterations = k + 1;
            break;
        }
    }
    result.final_residual = res;
    result.x.reserve(agent_count());
    for (const AgentState& a : agents_) result.x.push_back(a.x);
    return result;
}

RunResult run_until_converged(const ProblemSpec& spec, const Topology& topo,
                              const RunConfig& config) {
    Engine engine(spec, build_comm_matrix(topo), config);
    engine.init_random();
    return engine.run();
}

double ComparisonTable::median_ratio() const {
    std::vector<double> ratios;
    ratios.reserve(rows.size());
    for (const auto& r : rows) ratios.push_back(r.ratio);
    if (ratios.empty()) return 0.0;
    std::sort(ratios.begin(), ratios.end());
    const std::size_t h = ratios.size() / 2;
    if (ratios.size() % 2 == 1) return ratios[h];
    return 0.5 * (ratios[h - 1] + ratios[h]);
}

double ComparisonTable::mean_fixed() const {
    if (rows.empty()) return 0.0;
    double s = 0.0;
    for (const auto& r : rows) s += r.fixed_iters;
    return s / static_cast<double>(rows.size());
}

double ComparisonTable::mean_adaptive() const {
    if (rows.empty()) return 0.0;
    double s = 0.0;
    for (const auto& r : rows) s += r.adaptive_iters;
    return s / static_cast<double>(rows.size());
}

bool ComparisonTable::any_censored() const {
    for (const auto& r : rows) {
        if (r.status_fixed == RunStatus::iteration_limit ||
            r.status_adaptive == RunStatus::iteration_limit) {
            return true;
        }
    }
    return false;
}

ComparisonTable compare_fixed_vs_adaptive(const ProblemSpec& spec,
                                          const CommMatrix& S,
                                          const RunConfig& config, int n_seeds,
                                          const std::string& topology_label) {
    if (n_seeds < 1) {
        throw std::invalid_argument("comparison: n_seeds must be >= 1");
    }
    ComparisonTable table;
    for (int s = 0; s < n_seeds; ++s) {
        RunConfig arm = config;
        arm.seed = config.seed + static_cast<std::uint64_t>(s);
        arm.trace_every = 0;

        arm.adaptive = false;
        Engine fixed_engine(spec, S, arm);
        fixed_engine.init_random();
        const RunResult fixed = fixed_engine.run();

        arm.adaptive = true;
        Engine adaptive_engine(spec, S, arm);
        adaptive_engine.init_random();
        const RunResult adaptive = adaptive_engine.run();

        ComparisonRow row;
        row.seed = static_cast<int>(arm.seed);
        row.agents = spec.agent_count;
        row.topology = topology_label;
        row.fixed_iters = fixed.iterations;
        row.adaptive_iters = adaptive.iterations;
        row.ratio = static_cast<double>(adaptive.iterations) /
                    static_cast<double>(fixed.iterations);
        row.status_fixed = fixed.status;
        row.status_adaptive = adaptive.status;
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace admm
