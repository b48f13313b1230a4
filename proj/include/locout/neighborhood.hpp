#pragma once

#include "locout/data.hpp"

#include <vector>

namespace locout {

// k nearest neighbours and the trimming proportion alpha. The core of a
// projection keeps the densest ceil(alpha*k) observations of the
// neighbourhood.
struct NeighborhoodParams {
    int k = 20;
    double alpha = 0.5;

    // ceil(alpha*k), with a guard against ceil(10.000000000000002)-style
    // artefacts when alpha*k is an integer up to rounding.
    int core_size() const;

    // Throws parameter_error unless 2 <= core_size() <= k <= n-1.
    void check(Index n) const;
};

/// One initiating observation's neighbourhood model: its knn set, the core
/// center x0 (densest member), and the core member set.
struct Core {
    Index initiator = -1;
    Index center = -1;
    std::vector<Index> knn;     // sorted by (distance to initiator, index)
    std::vector<Index> members; // ascending index order; includes center
    double covering_radius = 0; // max distance from center to any member

    bool contains(Index i) const;
};

/// Indices of the k rows nearest to y, excluding y itself. Ties at the
/// k-th distance are broken by ascending row index.
std::vector<Index> knn_set(Index y, const DistanceMatrix& D, int k);

/// Pick the core: the center x0 is the knn member whose ceil(alpha*k)-th
/// smallest distance to knn(y) (counting itself at distance 0) is minimal;
/// the members are the ceil(alpha*k) knn observations closest to x0.
Core select_core(Index y, const DistanceMatrix& D,
                 const NeighborhoodParams& params);

} // namespace locout
