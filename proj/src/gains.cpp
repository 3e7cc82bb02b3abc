#include "admm/gains.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace admm {

GainRow::GainRow(int owner, std::vector<int> neighbors,
                 const std::vector<double>& beta0, double gamma)
    : owner_(owner), gamma_(gamma), nbrs_(std::move(neighbors)) {
    if (nbrs_.empty()) {
        throw std::invalid_argument("gain row: empty neighborhood");
    }
    if (!std::is_sorted(nbrs_.begin(), nbrs_.end()) ||
        std::adjacent_find(nbrs_.begin(), nbrs_.end()) != nbrs_.end()) {
        throw std::invalid_argument("gain row: neighbors must be sorted unique");
    }
    if (!std::binary_search(nbrs_.begin(), nbrs_.end(), owner_)) {
        throw std::invalid_argument("gain row: owner must be its own neighbor");
    }
    if (beta0.size() != nbrs_.size()) {
        throw std::invalid_argument("gain row: one raw weight per neighbor");
    }
    if (!(gamma_ > 0.0 && gamma_ < 1.0)) {
        throw std::invalid_argument("gain row: gamma must lie in (0, 1)");
    }
    for (double b : beta0) {
        if (!(b > 0.0)) {
            throw std::invalid_argument("gain row: raw weights must be positive");
        }
    }
    const double total = std::accumulate(beta0.begin(), beta0.end(), 0.0);
    d_.resize(beta0.size());
    for (std::size_t p = 0; p < beta0.size(); ++p) d_[p] = beta0[p] / total;
}

int GainRow::pos(int j) const {
    const auto it = std::lower_bound(nbrs_.begin(), nbrs_.end(), j);
    if (it == nbrs_.end() || *it != j) return -1;
    return static_cast<int>(it - nbrs_.begin());
}

double GainRow::d(int j) const {
    const int p = pos(j);
    return p < 0 ? 0.0 : d_[p];
}

double GainRow::sum() const {
    return std::accumulate(d_.begin(), d_.end(), 0.0);
}

AdaptationDecision GainRow::adapt(int max_index, int min_index, double h) {
    const int pl = pos(max_index);
    const int pm = pos(min_index);
    if (pl < 0 || pm < 0) {
        throw std::invalid_argument("gain row: adapt index outside neighborhood");
    }
    AdaptationDecision dec;
    dec.max_index = max_index;
    dec.min_index = min_index;
    dec.h = h;
    if (max_index == min_index || h == 0.0) {
        return dec;
    }
    dec.epsilon = h > 0.0 ? gamma_ * d_[pm] : -gamma_ * d_[pl];
    d_[pl] += dec.epsilon;
    d_[pm] -= dec.epsilon;
    return dec;
}

std::pair<int, int> select_extremal_neighbors(
    const Eigen::VectorXd& grad, const Eigen::VectorXd& x,
    const std::map<int, Eigen::VectorXd>& z_received) {
    if (z_received.empty()) {
        throw std::invalid_argument("extremal selection: no received estimates");
    }
    int max_index = -1;
    int min_index = -1;
    double best_max = 0.0;
    double best_min = 0.0;
    for (const auto& [j, zj] : z_received) {
        const double dot = grad.dot(x - zj);
        if (max_index < 0 || dot > best_max) {
            max_index = j;
            best_max = dot;
        }
        if (min_index < 0 || dot < best_min) {
            min_index = j;
            best_min = dot;
        }
    }
    return {max_index, min_index};
}

double compute_h(const Eigen::VectorXd& x_tilde,
                 const Eigen::VectorXd& z_tilde_max,
                 const Eigen::VectorXd& z_tilde_min, double alpha) {
    if (z_tilde_max.size() != x_tilde.size() ||
        z_tilde_min.size() != x_tilde.size()) {
        throw std::invalid_argument(
            "h: residue dimensions must match the iterate");
    }
    return 2.0 * alpha *
           x_tilde.dot((x_tilde - z_tilde_max) - (x_tilde - z_tilde_min));
}

}  // namespace admm
