#include "admm/problem.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace admm {

namespace {

void validate_quadratic(const QuadraticObjective& q) {
    if (q.Q.rows() != q.Q.cols()) {
        throw std::invalid_argument("quadratic objective: Q must be square");
    }
    if (q.c.size() != q.Q.rows()) {
        throw std::invalid_argument("quadratic objective: c size mismatch");
    }
    if (q.Q.size() == 0) {
        throw std::invalid_argument("quadratic objective: empty Q");
    }
    const double asym = (q.Q - q.Q.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-9) {
        throw std::invalid_argument("quadratic objective: Q must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q.Q,
                                                       Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10) {
        throw std::invalid_argument(
            "quadratic objective: Q must be positive semidefinite");
    }
}

void validate_logsumexp(const LogSumExpObjective& l) {
    if (l.B.rows() == 0 || l.B.cols() == 0) {
        throw std::invalid_argument("logsumexp objective: empty B");
    }
    if (l.b.size() != l.B.rows()) {
        throw std::invalid_argument("logsumexp objective: b size mismatch");
    }
}

// Stable softmax weights of v.
Eigen::VectorXd softmax(const Eigen::VectorXd& v) {
    const double m = v.maxCoeff();
    Eigen::VectorXd e = (v.array() - m).exp();
    return e / e.sum();
}

}  // namespace

Objective::Objective(QuadraticObjective q) : f_(std::move(q)) {
    validate_quadratic(std::get<QuadraticObjective>(f_));
}

Objective::Objective(LogSumExpObjective l) : f_(std::move(l)) {
    validate_logsumexp(std::get<LogSumExpObjective>(f_));
}

int Objective::dim() const {
    if (const auto* q = std::get_if<QuadraticObjective>(&f_)) {
        return static_cast<int>(q->Q.rows());
    }
    return static_cast<int>(std::get<LogSumExpObjective>(f_).B.cols());
}

bool Objective::is_quadratic() const {
    return std::holds_alternative<QuadraticObjective>(f_);
}

const QuadraticObjective& Objective::quadratic() const {
    if (const auto* q = std::get_if<QuadraticObjective>(&f_)) return *q;
    throw std::logic_error("objective is not quadratic");
}

const LogSumExpObjective& Objective::logsumexp() const {
    if (const auto* l = std::get_if<LogSumExpObjective>(&f_)) return *l;
    throw std::logic_error("objective is quadratic");
}

double Objective::value(const Eigen::VectorXd& x) const {
    if (x.size() != dim()) {
        throw std::invalid_argument("objective value: dimension mismatch");
    }
    if (const auto* q = std::get_if<QuadraticObjective>(&f_)) {
        const Eigen::VectorXd r = x - q->c;
        return 0.5 * r.dot(q->Q * r);
    }
    const auto& l = std::get<LogSumExpObjective>(f_);
    const Eigen::VectorXd v = l.B * x + l.b;
    const double m = v.maxCoeff();
    return m + std::log((v.array() - m).exp().sum());
}

Eigen::VectorXd Objective::gradient(const Eigen::VectorXd& x) const {
    if (x.size() != dim()) {
        throw std::invalid_argument("objective gradient: dimension mismatch");
    }
    if (const auto* q = std::get_if<QuadraticObjective>(&f_)) {
        return q->Q * (x - q->c);
    }
    const auto& l = std::get<LogSumExpObjective>(f_);
    return l.B.transpose() * softmax(l.B * x + l.b);
}

const Eigen::MatrixXd* ConstraintSet::block(int i, int j) const {
    auto it = blocks.find({i, j});
    return it == blocks.end() ? nullptr : &it->second;
}

void ProblemSpec::validate() const {
    if (agent_count <= 0) {
        throw std::invalid_argument("problem: agent count must be positive");
    }
    if (dim <= 0) {
        throw std::invalid_argument("problem: dimension must be positive");
    }
    if (static_cast<int>(objectives.size()) != agent_count) {
        throw std::invalid_argument("problem: one objective per agent required");
    }
    for (const auto& f : objectives) {
        if (f.dim() != dim) {
            throw std::invalid_argument("problem: objective dimension mismatch");
        }
    }
    if (constraints.agent_count != agent_count || constraints.dim != dim) {
        throw std::invalid_argument("problem: constraint shape mismatch");
    }
    for (const auto& [key, block] : constraints.blocks) {
        const auto [i, j] = key;
        if (i < 0 || j < 0 || i >= agent_count || j >= agent_count) {
            throw std::invalid_argument("problem: constraint block out of range");
        }
        if (block.rows() != dim || block.cols() != dim) {
            throw std::invalid_argument("problem: constraint block shape");
        }
    }
}

bool ProblemSpec::all_quadratic() const {
    for (const auto& f : objectives) {
        if (!f.is_quadratic()) return false;
    }
    return true;
}

ConstraintSet build_laplacian_constraints(const CommMatrix& S, int n) {
    if (n <= 0) {
        throw std::invalid_argument("constraints: dimension must be positive");
    }
    ConstraintSet cs;
    cs.agent_count = S.agent_count();
    cs.dim = n;
    cs.structure = ConstraintSet::Structure::laplacian_consensus;
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < cs.agent_count; ++i) {
        const int deg = S.degree(i);
        if (deg > 0) {
            cs.blocks[{i, i}] = static_cast<double>(deg) * eye;
        }
        for (int j : S.neighbors(i)) {
            if (j != i) cs.blocks[{i, j}] = -eye;
        }
    }
    return cs;
}

namespace {

// Shared-variable reduction of consensus problems: minimize sum_i f_i(y).
Eigen::VectorXd consensus_minimizer(const ProblemSpec& spec) {
    const int n = spec.dim;
    if (spec.all_quadratic()) {
        Eigen::MatrixXd Qs = Eigen::MatrixXd::Zero(n, n);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
        for (const auto& f : spec.objectives) {
            const auto& q = f.quadratic();
            Qs += q.Q;
            rhs += q.Q * q.c;
        }
        const Eigen::VectorXd y = Qs.ldlt().solve(rhs);
        const double scale = std::max(1.0, rhs.norm());
        if (!y.allFinite() || (Qs * y - rhs).norm() > 1e-8 * scale) {
            throw DegenerateProblem(
                "oracle: aggregate quadratic system is singular");
        }
        return y;
    }

    // Damped Newton descent on the aggregate objective; plain gradient steps
    // crawl on the nearly flat valleys these objectives develop, so the
    // exact aggregate curvature is used instead.
    const auto total_value = [&](const Eigen::VectorXd& y) {
        double v = 0.0;
        for (const auto& f : spec.objectives) v += f.value(y);
        return v;
    };
    const auto total_hessian = [&](const Eigen::VectorXd& y) {
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
        for (const auto& f : spec.objectives) {
            if (f.is_quadratic()) {
                H += f.quadratic().Q;
            } else {
                const auto& l = f.logsumexp();
                const Eigen::VectorXd s = softmax(l.B * y + l.b);
                H += l.B.transpose() *
                     (Eigen::MatrixXd(s.asDiagonal()) - s * s.transpose()) *
                     l.B;
            }
        }
        return H;
    };
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    const int cap = 500;
    for (int it = 0; it < cap; ++it) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
        for (const auto& f : spec.objectives) g += f.gradient(y);
        if (g.norm() <= 1e-10) return y;
        const Eigen::MatrixXd H = total_hessian(y);
        // A touch of damping keeps the direction well defined when the
        // curvature is close to singular; fall back to the gradient if the
        // solve still fails to produce a descent direction.
        Eigen::VectorXd step =
            (H + 1e-12 * Eigen::MatrixXd::Identity(n, n)).ldlt().solve(g);
        if (!step.allFinite() || g.dot(step) <= 0.0) step = g;
        const double slope = g.dot(step);
        const double fy = total_value(y);
        double t = 1.0;
        while (t > 1e-18 &&
               total_value(y - t * step) > fy - 1e-4 * t * slope) {
            t *= 0.5;
        }
        y -= t * step;
    }
    throw OracleIterationLimit("oracle: descent iteration cap reached");
}

// Direct stationarity-system solve for quadratic objectives under arbitrary
// coupling rows: [blkdiag(Q), B^T; B, 0] [x; nu] = [Q c; 0].
OracleSolution kkt_solve(const ProblemSpec& spec) {
    if (!spec.all_quadratic()) {
        throw std::invalid_argument(
            "oracle: custom couplings require quadratic objectives");
    }
    const int N = spec.agent_count;
    const int n = spec.dim;
    const int m = N * n;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * m);
    for (int i = 0; i < N; ++i) {
        const auto& q = spec.objectives[i].quadratic();
        K.block(i * n, i * n, n, n) = q.Q;
        rhs.segment(i * n, n) = q.Q * q.c;
    }
    for (const auto& [key, block] : spec.constraints.blocks) {
        const auto [i, j] = key;
        K.block(m + i * n, j * n, n, n) = block;
        K.block(j * n, m + i * n, n, n) = block.transpose();
    }
    const Eigen::VectorXd sol =
        K.completeOrthogonalDecomposition().solve(rhs);
    const double scale = std::max(1.0, rhs.norm());
    if (!sol.allFinite() || (K * sol - rhs).norm() > 1e-8 * scale) {
        throw DegenerateProblem(
            "oracle: stationarity system is singular or inconsistent");
    }
    OracleSolution out;
    out.x.reserve(N);
    Eigen::VectorXd residual = Eigen::VectorXd::Zero(m);
    for (const auto& [key, block] : spec.constraints.blocks) {
        const auto [i, j] = key;
        residual.segment(i * n, n) += block * sol.segment(j * n, n);
    }
    if (residual.norm() > 1e-8 * scale) {
        throw DegenerateProblem("oracle: solution violates the coupling rows");
    }
    for (int i = 0; i < N; ++i) {
        out.x.push_back(sol.segment(i * n, n));
    }
    out.value = 0.0;
    for (int i = 0; i < N; ++i) {
        out.value += spec.objectives[i].value(out.x[i]);
    }
    return out;
}

}  // namespace

OracleSolution oracle_solve(const ProblemSpec& spec) {
    spec.validate();
    if (spec.constraints.structure ==
        ConstraintSet::Structure::laplacian_consensus) {
        const Eigen::VectorXd y = consensus_minimizer(spec);
        OracleSolution out;
        out.x.assign(spec.agent_count, y);
        out.value = 0.0;
        for (const auto& f : spec.objectives) out.value += f.value(y);
        return out;
    }
    return kkt_solve(spec);
}

ProblemSpec sample_problem(const CommMatrix& S, int n, ObjectiveKind kind,
                           std::uint64_t seed) {
    if (n <= 0) {
        throw std::invalid_argument("sample: dimension must be positive");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> wide(-5.0, 5.0);

    ProblemSpec spec;
    spec.agent_count = S.agent_count();
    spec.dim = n;
    spec.objectives.reserve(spec.agent_count);
    for (int i = 0; i < spec.agent_count; ++i) {
        if (kind == ObjectiveKind::quadratic) {
            Eigen::MatrixXd G(n, n);
            for (int r = 0; r < n; ++r) {
                for (int c = 0; c < n; ++c) G(r, c) = unit(rng);
            }
            Eigen::VectorXd c(n);
            for (int r = 0; r < n; ++r) c(r) = wide(rng);
            QuadraticObjective q;
            q.Q = G.transpose() * G + 0.1 * Eigen::MatrixXd::Identity(n, n);
            q.c = c;
            spec.objectives.emplace_back(std::move(q));
        } else {
            // Mirrored rows keep the instance coercive whenever C has full
            // column rank, which holds almost surely.
            Eigen::MatrixXd C(n, n);
            for (int r = 0; r < n; ++r) {
                for (int c = 0; c < n; ++c) C(r, c) = unit(rng);
            }
            Eigen::VectorXd b(2 * n);
            for (int r = 0; r < 2 * n; ++r) b(r) = unit(rng);
            LogSumExpObjective l;
            l.B.resize(2 * n, n);
            l.B.topRows(n) = C;
            l.B.bottomRows(n) = -C;
            l.b = b;
            spec.objectives.emplace_back(std::move(l));
        }
    }
    // Rescale the consensus coupling so the synchronous estimate-exchange
    // recursion contracts. With uniform gains 1/(deg+1), the estimate map is
    // stable only while (w/d)·σ_max²(row) < 1/3, and an unscaled row
    // [deg·I, -I, ...] has σ_max² = deg² + deg. Dividing row i by
    // sqrt((worst_deg+1)·(deg_i² + deg_i)) — worst_deg taken over the closed
    // neighborhood because the gain that divides row i's bracket lives in the
    // neighbors' rows — normalizes that product to kCouplingScale², which is
    // held just below the 1/3 bound so runs converge but retain enough
    // transient oscillation for gain adaptation to pay off.
    constexpr double kCouplingScale = 0.55;
    ConstraintSet cs = build_laplacian_constraints(S, n);
    for (auto& [key, block] : cs.blocks) {
        const int i = key.first;
        int worst_deg = S.degree(i);
        for (int j : S.neighbors(i)) {
            worst_deg = std::max(worst_deg, S.degree(j));
        }
        const double deg = static_cast<double>(S.degree(i));
        const double wd = static_cast<double>(worst_deg);
        block *= kCouplingScale / std::sqrt((wd + 1.0) * (deg * deg + deg));
    }
    spec.constraints = std::move(cs);
    spec.validate();
    return spec;
}

}  // namespace admm
