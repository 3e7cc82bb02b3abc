// Separable convex objectives, linear coupling constraints, and the
// centralized reference solver the benchmark harness validates against.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "admm/network.hpp"

namespace admm {

// f(x) = 1/2 (x - c)^T Q (x - c), Q symmetric positive semidefinite.
struct QuadraticObjective {
    Eigen::MatrixXd Q;
    Eigen::VectorXd c;
};

// f(x) = log sum_m exp(B_m x + b_m).
struct LogSumExpObjective {
    Eigen::MatrixXd B;
    Eigen::VectorXd b;
};

class Objective {
  public:
    Objective(QuadraticObjective q);   // validates symmetry and PSD-ness
    Objective(LogSumExpObjective l);   // validates shape compatibility

    int dim() const;
    bool is_quadratic() const;
    const QuadraticObjective& quadratic() const;   // throws if not quadratic
    const LogSumExpObjective& logsumexp() const;   // throws if quadratic
    double value(const Eigen::VectorXd& x) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;

  private:
    std::variant<QuadraticObjective, LogSumExpObjective> f_;
};

// Block-structured coupling: agent i's row ties its neighborhood together via
// sum_{j in N_i} A_ij x_j = 0. Absent blocks are zero.
struct ConstraintSet {
    enum class Structure { laplacian_consensus, custom };

    int agent_count = 0;
    int dim = 0;
    Structure structure = Structure::custom;
    std::map<std::pair<int, int>, Eigen::MatrixXd> blocks;

    // nullptr for a zero block.
    const Eigen::MatrixXd* block(int i, int j) const;
};

struct ProblemSpec {
    int agent_count = 0;
    int dim = 0;
    std::vector<Objective> objectives;
    ConstraintSet constraints;

    void validate() const;  // throws std::invalid_argument
    bool all_quadratic() const;
};

enum class ObjectiveKind { quadratic, logsumexp };

// Graph-Laplacian coupling rows: A_ii = deg(i) I, A_ij = -I for neighbors.
// Its kernel on a connected graph is exactly the consensus subspace.
ConstraintSet build_laplacian_constraints(const CommMatrix& S, int n);

struct OracleSolution {
    std::vector<Eigen::VectorXd> x;  // per-agent minimizer
    double value = 0.0;              // optimal objective total
};

// Centralized reference solve. Consensus-structured problems reduce to a
// single shared variable (closed form for quadratics, descent otherwise);
// custom couplings with quadratic objectives go through the stationarity
// system directly.
OracleSolution oracle_solve(const ProblemSpec& spec);

// Deterministic random instance on the given graph. Quadratics are sampled
// strongly convex; the smooth non-quadratic kind is sampled coercive.
ProblemSpec sample_problem(const CommMatrix& S, int n, ObjectiveKind kind,
                           std::uint64_t seed);

// The reference solver hit its iteration cap before reaching tolerance.
struct OracleIterationLimit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The stationarity system is singular or inconsistent.
struct DegenerateProblem : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace admm
