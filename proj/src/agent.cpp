#include "admm/agent.hpp"

#include <stdexcept>

namespace admm {

namespace {

// Every neighbor must have exactly one payload; extras are rejected too.
template <typename Map>
void require_full_coverage(const std::vector<int>& nbrs, const Map& payloads,
                           const char* what) {
    if (payloads.size() != nbrs.size()) {
        throw std::invalid_argument(std::string(what) +
                                    ": payload count does not match N_i");
    }
    for (int j : nbrs) {
        if (payloads.find(j) == payloads.end()) {
            throw std::invalid_argument(std::string(what) +
                                        ": missing neighbor payload");
        }
    }
}

}  // namespace

AgentState::AgentState(int id_, Objective objective_,
                       std::map<int, Eigen::MatrixXd> coupling_row_,
                       GainRow gains_, double alpha_, double w_,
                       const Eigen::VectorXd& x0)
    : id(id_),
      alpha(alpha_),
      w(w_),
      objective(std::move(objective_)),
      coupling_row(std::move(coupling_row_)),
      gains(std::move(gains_)) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("agent: alpha must lie in (0, 1)");
    }
    if (!(w > 0.0)) {
        throw std::invalid_argument("agent: w must be positive");
    }
    if (x0.size() != objective.dim()) {
        throw std::invalid_argument("agent: initial point dimension mismatch");
    }
    if (gains.owner() != id) {
        throw std::invalid_argument("agent: gain row owner mismatch");
    }
    x = x0;
    x_prev = x0;
    mu = Eigen::VectorXd::Zero(x0.size());
    mu_prev = mu;
}

Eigen::VectorXd AgentState::x_update(
    const std::map<int, NeighborEstimate>& payloads) const {
    require_full_coverage(gains.neighbors(), payloads, "x update");
    Eigen::VectorXd force = objective.gradient(x);
    for (const auto& [j, est] : payloads) {
        force += est.lambda + gains.d(j) * (x - est.z);
    }
    return x - alpha * force;
}

Eigen::VectorXd AgentState::exact_x_update(
    const std::map<int, NeighborEstimate>& payloads) const {
    require_full_coverage(gains.neighbors(), payloads, "exact x update");
    const auto& q = objective.quadratic();
    const int n = objective.dim();
    double dsum = 0.0;
    Eigen::VectorXd rhs = q.Q * q.c;
    for (const auto& [j, est] : payloads) {
        const double dij = gains.d(j);
        dsum += dij;
        rhs += dij * est.z - est.lambda;
    }
    const Eigen::MatrixXd M =
        q.Q + dsum * Eigen::MatrixXd::Identity(n, n);
    return M.ldlt().solve(rhs);
}

Eigen::VectorXd AgentState::z_update(int target,
                                     const Eigen::VectorXd& x_target_new,
                                     double gain_from_target) const {
    if (z.find(target) == z.end()) {
        throw std::invalid_argument("z update: unknown target");
    }
    if (!(gain_from_target > 0.0)) {
        throw std::invalid_argument("z update: received gain must be positive");
    }
    Eigen::VectorXd bracket = lambda.at(target);
    if (const auto it = coupling_row.find(target); it != coupling_row.end()) {
        const Eigen::VectorXd q = coupling_residual();
        bracket -= it->second.transpose() * (mu + w * q);
    }
    return x_target_new + bracket / gain_from_target;
}

std::map<int, Eigen::VectorXd> AgentState::exact_z_update(
    const std::map<int, PhaseOneMessage>& phase1) const {
    const auto& nbrs = gains.neighbors();
    require_full_coverage(nbrs, phase1, "exact z update");
    const int m = static_cast<int>(nbrs.size());
    const int n = objective.dim();

    // Stationarity of the whole estimate block:
    //   d_ji z_ji + w A_ij^T sum_p A_ip z_pi = d_ji x_j + lambda_ji - A_ij^T mu
    Eigen::MatrixXd A_stack = Eigen::MatrixXd::Zero(n, m * n);
    for (int p = 0; p < m; ++p) {
        if (const auto it = coupling_row.find(nbrs[p]);
            it != coupling_row.end()) {
            A_stack.middleCols(p * n, n) = it->second;
        }
    }
    Eigen::MatrixXd M = w * A_stack.transpose() * A_stack;
    Eigen::VectorXd rhs(m * n);
    for (int p = 0; p < m; ++p) {
        const int t = nbrs[p];
        const auto& msg = phase1.at(t);
        if (!(msg.gain_on_recipient > 0.0)) {
            throw std::invalid_argument(
                "exact z update: received gain must be positive");
        }
        M.block(p * n, p * n, n, n) +=
            msg.gain_on_recipient * Eigen::MatrixXd::Identity(n, n);
        Eigen::VectorXd r = msg.gain_on_recipient * msg.x + lambda.at(t);
        if (const auto it = coupling_row.find(t); it != coupling_row.end()) {
            r -= it->second.transpose() * mu;
        }
        rhs.segment(p * n, n) = r;
    }
    const Eigen::VectorXd sol = M.ldlt().solve(rhs);
    std::map<int, Eigen::VectorXd> out;
    for (int p = 0; p < m; ++p) {
        out[nbrs[p]] = sol.segment(p * n, n);
    }
    return out;
}

Eigen::VectorXd AgentState::mu_update(
    const std::map<int, Eigen::VectorXd>& z_new) const {
    Eigen::VectorXd q = Eigen::VectorXd::Zero(objective.dim());
    for (const auto& [j, block] : coupling_row) {
        q += block * z_new.at(j);
    }
    return mu + w * q;
}

Eigen::VectorXd AgentState::lambda_update(int target,
                                          const Eigen::VectorXd& x_target_new,
                                          const Eigen::VectorXd& z_target_new,
                                          double gain_from_target) const {
    if (lambda.find(target) == lambda.end()) {
        throw std::invalid_argument("lambda update: unknown target");
    }
    return lambda.at(target) + gain_from_target * (x_target_new - z_target_new);
}

double AgentState::local_energy() const {
    if (rounds_completed < 1) {
        throw std::logic_error(
            "local energy: no completed round, differences undefined");
    }
    double e = (x - x_prev).squaredNorm() + (mu - mu_prev).squaredNorm();
    for (const auto& [j, zj] : z) {
        e += (zj - z_prev.at(j)).squaredNorm();
        e += (lambda.at(j) - lambda_prev.at(j)).squaredNorm();
    }
    return e;
}

Eigen::VectorXd AgentState::coupling_residual() const {
    Eigen::VectorXd q = Eigen::VectorXd::Zero(objective.dim());
    for (const auto& [j, block] : coupling_row) {
        q += block * z.at(j);
    }
    return q;
}

void AgentState::save_previous() {
    x_prev = x;
    mu_prev = mu;
    z_prev = z;
    lambda_prev = lambda;
}

double boxed_energy_term(double alpha, const Eigen::VectorXd& x_tilde,
                         const std::map<int, Eigen::VectorXd>& z_residues,
                         const GainRow& row) {
    double acc = 0.0;
    for (int j : row.neighbors()) {
        const auto it = z_residues.find(j);
        if (it == z_residues.end()) {
            throw std::invalid_argument("boxed energy: missing residue");
        }
        acc += row.d(j) * x_tilde.dot(x_tilde - it->second);
    }
    return -2.0 * alpha * acc;
}

double delta_boxed_energy(double alpha, const Eigen::VectorXd& x_tilde,
                          const std::map<int, Eigen::VectorXd>& z_residues,
                          const GainRow& before, const GainRow& after) {
    return boxed_energy_term(alpha, x_tilde, z_residues, after) -
           boxed_energy_term(alpha, x_tilde, z_residues, before);
}

}  // namespace admm
