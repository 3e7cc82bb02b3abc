#include "admm/network.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>

#include "admm/problem.hpp"

namespace admm {

void Topology::validate() const {
    if (agent_count <= 0) {
        throw std::invalid_argument("topology: agent count must be positive");
    }
    for (const auto& [a, b] : edges) {
        if (a < 0 || b < 0 || a >= agent_count || b >= agent_count) {
            throw std::invalid_argument("topology: edge endpoint out of range");
        }
        if (a == b) {
            throw std::invalid_argument("topology: self-loops are not allowed");
        }
    }
    std::vector<std::pair<int, int>> sorted;
    sorted.reserve(edges.size());
    for (const auto& [a, b] : edges) {
        sorted.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw std::invalid_argument("topology: duplicate edge");
    }
}

bool Topology::has_edge(int i, int j) const {
    for (const auto& [a, b] : edges) {
        if ((a == i && b == j) || (a == j && b == i)) return true;
    }
    return false;
}

int Topology::degree(int i) const {
    int deg = 0;
    for (const auto& [a, b] : edges) {
        if (a == i || b == i) ++deg;
    }
    return deg;
}

void normalize_edges(Topology& topo) {
    for (auto& [a, b] : topo.edges) {
        if (a > b) std::swap(a, b);
    }
    std::sort(topo.edges.begin(), topo.edges.end());
    topo.edges.erase(std::unique(topo.edges.begin(), topo.edges.end()),
                     topo.edges.end());
}

std::size_t CommMatrix::idx(int i, int j) const {
    if (i < 0 || j < 0 || i >= n_ || j >= n_) {
        throw std::out_of_range("comm matrix: index out of range");
    }
    return static_cast<std::size_t>(i) * n_ + j;
}

CommMatrix::CommMatrix(int agent_count,
                       const std::vector<std::pair<int, int>>& edges)
    : n_(agent_count) {
    if (n_ <= 0) {
        throw std::invalid_argument("comm matrix: agent count must be positive");
    }
    entries_.assign(static_cast<std::size_t>(n_) * n_, 0);
    for (int i = 0; i < n_; ++i) entries_[idx(i, i)] = 1;
    for (const auto& [a, b] : edges) {
        entries_[idx(a, b)] = 1;
        entries_[idx(b, a)] = 1;
    }
    nbrs_.resize(n_);
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            if (entries_[idx(i, j)] != 0) nbrs_[i].push_back(j);
        }
    }
}

CommMatrix build_comm_matrix(const Topology& topo) {
    topo.validate();
    return CommMatrix(topo.agent_count, topo.edges);
}

bool check_connected(const CommMatrix& S) {
    const int n = S.agent_count();
    std::vector<char> seen(n, 0);
    std::vector<int> stack = {0};
    seen[0] = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int u : S.neighbors(v)) {
            if (!seen[u]) {
                seen[u] = 1;
                stack.push_back(u);
            }
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

bool check_conformity(const CommMatrix& S, const ConstraintSet& constraints) {
    if (constraints.agent_count != S.agent_count()) return false;
    for (const auto& [key, block] : constraints.blocks) {
        if (block.cwiseAbs().maxCoeff() == 0.0) continue;
        const auto [i, j] = key;
        if (!S.linked(i, j) || !S.linked(j, i)) return false;
    }
    return true;
}

Topology gen_ring(int N) {
    if (N < 3) {
        throw std::invalid_argument("ring topology requires at least 3 agents");
    }
    Topology topo;
    topo.agent_count = N;
    for (int i = 0; i < N; ++i) {
        topo.edges.emplace_back(i, (i + 1) % N);
    }
    normalize_edges(topo);
    return topo;
}

Topology gen_augmented_ring(int N, int max_degree, std::uint64_t seed,
                            int attempts) {
    if (max_degree < 2) {
        throw std::invalid_argument(
            "augmented ring: max_degree must be at least 2 to keep the ring");
    }
    Topology topo = gen_ring(N);
    if (attempts <= 0) attempts = 10 * N;

    std::vector<int> deg(N, 2);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, N - 1);
    for (int t = 0; t < attempts; ++t) {
        const int a = pick(rng);
        const int b = pick(rng);
        if (a == b) continue;
        if (deg[a] >= max_degree || deg[b] >= max_degree) continue;
        if (topo.has_edge(a, b)) continue;
        topo.edges.emplace_back(std::min(a, b), std::max(a, b));
        ++deg[a];
        ++deg[b];
    }
    normalize_edges(topo);
    return topo;
}

}  // namespace admm
