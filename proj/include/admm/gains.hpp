// Per-agent penalty rows. Each agent owns one row of the penalty matrix,
// normalized so its neighborhood entries sum to one, and rebalances mass
// between the two extremal neighbors picked each round.
#pragma once

#include <Eigen/Dense>
#include <map>
#include <utility>
#include <vector>

namespace admm {

// Outcome of one rebalancing step: the pair of neighbors moved and how much
// mass epsilon flowed from the min side to the max side.
struct AdaptationDecision {
    int max_index = -1;
    int min_index = -1;
    double h = 0.0;
    double epsilon = 0.0;
};

class GainRow {
  public:
    GainRow() = default;
    // neighbors: sorted neighborhood of the owner, owner included.
    // beta0: positive raw weights, one per neighbor; the row is normalized
    // to d_j = beta0_j / sum(beta0). gamma in (0, 1) is the rebalance factor.
    GainRow(int owner, std::vector<int> neighbors,
            const std::vector<double>& beta0, double gamma);

    int owner() const { return owner_; }
    double gamma() const { return gamma_; }
    const std::vector<int>& neighbors() const { return nbrs_; }
    // Penalty applied by the owner to neighbor j; zero off the neighborhood.
    double d(int j) const;
    double sum() const;

    // Moves epsilon = +/- gamma * (losing entry) from min_index to max_index:
    //   h > 0: epsilon = gamma * d_min,  d_max += epsilon, d_min -= epsilon
    //   h < 0: epsilon = -gamma * d_max, same two-entry update
    //   h == 0 or max_index == min_index: no change.
    // Touches at most two entries and preserves the row sum and positivity.
    AdaptationDecision adapt(int max_index, int min_index, double h);

  private:
    int pos(int j) const;  // -1 if j is not a neighbor

    int owner_ = -1;
    double gamma_ = 0.5;
    std::vector<int> nbrs_;
    std::vector<double> d_;
};

// Picks the neighbors maximizing and minimizing grad . (x - z_j) over the
// received estimates; ties resolve to the smallest index. If every product
// is equal both picks coincide.
std::pair<int, int> select_extremal_neighbors(
    const Eigen::VectorXd& grad, const Eigen::VectorXd& x,
    const std::map<int, Eigen::VectorXd>& z_received);

// h = 2 alpha x_t . [(x_t - z_t_max) - (x_t - z_t_min)] over one-round
// differences; its sign decides the direction of the rebalance.
double compute_h(const Eigen::VectorXd& x_tilde,
                 const Eigen::VectorXd& z_tilde_max,
                 const Eigen::VectorXd& z_tilde_min, double alpha);

}  // namespace admm
