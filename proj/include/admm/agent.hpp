// Per-agent state and update laws. An agent owns its primal variable, its
// coupling multiplier, and one estimate/multiplier pair per neighbor
// (itself included); everything it knows about its neighbors arrives as
// immutable message snapshots routed by the engine between phases.
#pragma once

#include <Eigen/Dense>
#include <map>

#include "admm/gains.hpp"
#include "admm/problem.hpp"

namespace admm {

// What agent i retains about neighbor j between rounds: j's current estimate
// of x_i, the multiplier j maintains for that estimate, and the one-round
// difference of the estimate.
struct NeighborEstimate {
    Eigen::VectorXd z;
    Eigen::VectorXd lambda;
    Eigen::VectorXd z_residue;
};

// First-exchange payload from agent j: its fresh primal iterate plus the
// penalty entry its row currently applies to the recipient.
struct PhaseOneMessage {
    int sender = -1;
    Eigen::VectorXd x;
    double gain_on_recipient = 0.0;
};

// Second-exchange payload from agent j to recipient i: j's updated estimate
// of x_i, the matching multiplier, and the estimate's one-round difference.
struct PhaseTwoMessage {
    int sender = -1;
    Eigen::VectorXd z;
    Eigen::VectorXd lambda;
    Eigen::VectorXd z_residue;
};

struct AgentState {
    int id = -1;
    double alpha = 0.1;  // primal step size, in (0, 1)
    double w = 1.0;      // coupling penalty weight, positive

    Objective objective;
    std::map<int, Eigen::MatrixXd> coupling_row;  // own blocks A_ij, j in N_i
    GainRow gains;                                // own penalty row

    Eigen::VectorXd x;
    Eigen::VectorXd mu;
    std::map<int, Eigen::VectorXd> z;       // own estimate of each neighbor
    std::map<int, Eigen::VectorXd> lambda;  // multiplier per estimate

    // Snapshot of the previous round, for one-round differences.
    Eigen::VectorXd x_prev;
    Eigen::VectorXd mu_prev;
    std::map<int, Eigen::VectorXd> z_prev;
    std::map<int, Eigen::VectorXd> lambda_prev;

    // Latest second-exchange payloads, keyed by sender.
    std::map<int, NeighborEstimate> received;

    int rounds_completed = 0;

    AgentState(int id, Objective objective,
               std::map<int, Eigen::MatrixXd> coupling_row, GainRow gains,
               double alpha, double w, const Eigen::VectorXd& x0);

    // Gradient step on the local augmented Lagrangian:
    //   x <- x - alpha * (grad f(x) + sum_j [lambda_ij + d_ij (x - z_ij)])
    // with z_ij, lambda_ij taken from the received estimates and d_ij from
    // the agent's own row. Throws if the payloads do not cover N_i.
    Eigen::VectorXd x_update(
        const std::map<int, NeighborEstimate>& payloads) const;

    // Exact minimizer of the same local Lagrangian; quadratic objectives only:
    //   (Q + sum_j d_ij I) x = Q c + sum_j (d_ij z_ij - lambda_ij).
    Eigen::VectorXd exact_x_update(
        const std::map<int, NeighborEstimate>& payloads) const;

    // Closed-form single-estimate step, coupling sum frozen at the previous
    // round's estimates:
    //   z_ji <- x_j + (lambda_ji - A_ij^T mu - w A_ij^T q) / d_ji,
    //   q = sum_p A_ip z_pi.
    // gain_from_target is the penalty the target currently applies to this
    // agent, delivered in the first exchange.
    Eigen::VectorXd z_update(int target, const Eigen::VectorXd& x_target_new,
                             double gain_from_target) const;

    // Joint minimization over the whole estimate block; used when the exact
    // per-round minimizers are requested. Keys of phase1 must cover N_i.
    std::map<int, Eigen::VectorXd> exact_z_update(
        const std::map<int, PhaseOneMessage>& phase1) const;

    // mu <- mu + w * sum_j A_ij z_ji over the fresh estimates.
    Eigen::VectorXd mu_update(
        const std::map<int, Eigen::VectorXd>& z_new) const;

    // lambda_ji <- lambda_ji + d_ji (x_j - z_ji) at the fresh values.
    Eigen::VectorXd lambda_update(int target,
                                  const Eigen::VectorXd& x_target_new,
                                  const Eigen::VectorXd& z_target_new,
                                  double gain_from_target) const;

    // Sum of squared one-round differences over everything the agent owns:
    //   ||x_t||^2 + ||mu_t||^2 + sum_j (||z_t||^2 + ||lambda_t||^2).
    // Throws before the first completed round.
    double local_energy() const;

    // sum_j A_ij z_ji over the agent's own current estimates.
    Eigen::VectorXd coupling_residual() const;

    void save_previous();
};

// d-weighted term of the one-round energy expansion:
//   -2 alpha x_t . sum_j d_j (x_t - z_t_j)
// over the received-estimate differences.
double boxed_energy_term(double alpha, const Eigen::VectorXd& x_tilde,
                         const std::map<int, Eigen::VectorXd>& z_residues,
                         const GainRow& row);

// Change of the boxed term when `before` is rebalanced into `after`;
// algebraically equal to -epsilon * h for the decision that produced `after`.
double delta_boxed_energy(double alpha, const Eigen::VectorXd& x_tilde,
                          const std::map<int, Eigen::VectorXd>& z_residues,
                          const GainRow& before, const GainRow& after);

}  // namespace admm
