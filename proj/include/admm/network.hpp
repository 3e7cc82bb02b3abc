// Communication graph types for the distributed solver: undirected topologies,
// the binary neighbor matrix derived from them, and the standard generators
// used by the benchmark harness.
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace admm {

struct ConstraintSet;  // problem.hpp

// Undirected communication graph on agents 0..agent_count-1, no self-loops.
// Edges are stored normalized: first < second, sorted, duplicate-free.
struct Topology {
    int agent_count = 0;
    std::vector<std::pair<int, int>> edges;

    // Throws std::invalid_argument on out-of-range endpoints, self-loops,
    // duplicates, or a non-positive agent count.
    void validate() const;
    bool has_edge(int i, int j) const;
    int degree(int i) const;  // neighbor count, self excluded
};

// Sorts, normalizes orientation, and drops duplicate edges in place.
void normalize_edges(Topology& topo);

// Binary neighbor matrix: symmetric with unit diagonal, so every agent is a
// member of its own neighborhood.
class CommMatrix {
  public:
    CommMatrix(int agent_count, const std::vector<std::pair<int, int>>& edges);

    int agent_count() const { return n_; }
    bool linked(int i, int j) const { return entries_[idx(i, j)] != 0; }
    // Sorted neighborhood of i, always containing i itself.
    const std::vector<int>& neighbors(int i) const { return nbrs_[i]; }
    // Neighbor count with self excluded.
    int degree(int i) const { return static_cast<int>(nbrs_[i].size()) - 1; }

  private:
    std::size_t idx(int i, int j) const;

    int n_ = 0;
    std::vector<std::uint8_t> entries_;
    std::vector<std::vector<int>> nbrs_;
};

CommMatrix build_comm_matrix(const Topology& topo);

// True iff the graph is connected (single agent counts as connected).
bool check_connected(const CommMatrix& S);

// True iff every nonzero coupling block sits on a mutually linked pair.
bool check_conformity(const CommMatrix& S, const ConstraintSet& constraints);

// Cycle 0-1-...-N-1-0. Requires N >= 3.
Topology gen_ring(int N);

// Ring plus randomly sampled chords, keeping every degree <= max_degree.
// Deterministic per seed. attempts <= 0 selects the default of 10*N draws.
Topology gen_augmented_ring(int N, int max_degree, std::uint64_t seed,
                            int attempts = 0);

}  // namespace admm
