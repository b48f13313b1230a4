#pragma once

#include "locout/data.hpp"
#include "locout/neighborhood.hpp"
#include "locout/projection.hpp"

#include <memory>
#include <vector>

namespace locout {

// Wall-clock seconds per pipeline stage, accumulated when a caller asks
// for instrumentation. Only meaningful for single-worker runs.
struct StageTimes {
    double t_distances = 0;
    double t_core_selection = 0;
    double t_svd = 0;
    double t_cd = 0;
    double t_od = 0;
    double t_weights = 0;
};

/// All n local projections plus the full evaluation grid:
/// cd(y, x) and od(y, x) are the core/orthogonal distances of observation x
/// under the projection initiated by y. Initiators whose cores have the
/// same member set share one fitted LocalProjection.
struct ProjectionEnsemble {
    std::vector<Core> cores;                                       // n
    std::vector<std::shared_ptr<const LocalProjection>> projections; // n
    Matrix cd;  // n x n, row = initiator y, col = observation x
    Matrix od;  // n x n
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> core_mask; // (y, x)

    Index size() const { return cd.rows(); }
};

ProjectionEnsemble build_ensemble(const DataMatrix& X, const DistanceMatrix& D,
                                  const NeighborhoodParams& params,
                                  CdVariant variant,
                                  const FitOptions& fit = {}, int threads = 1,
                                  StageTimes* stages = nullptr);

struct WeightVector {
    Vector w;                     // n, sums to 1
    bool uniform_fallback = false; // constant-CD denominator collapsed
};

/// Aggregation weights for observation x. Projections whose core contains
/// x get weight 0. Over the contributing set C(x) = {y : x not in core(y)}
/// the raw weight is 1/cd(y, x), shifted by the minimum and normalized to
/// sum 1. A vanishing denominator (all contributing CDs equal) falls back
/// to uniform weights on C(x). Throws scoring_error when C(x) is empty.
WeightVector weights(const ProjectionEnsemble& E, Index x);

struct ScoreReport {
    Vector locout;                         // n, final outlyingness scores
    std::vector<Index> weights_degenerate; // fallback fired for these x
    NeighborhoodParams params;
    CdVariant variant = CdVariant::literal;

    // per-observation diagnostics over all n projections
    Vector min_cd;
    Vector median_cd;
    std::vector<int> core_membership_count;

    // p <= ceil(alpha*k): every orthogonal complement is structurally
    // empty, so the scores carry no information and are forced to zero.
    bool low_dimension_degenerate = false;
    std::vector<std::string> warnings;
};

struct ScoreOptions {
    FitOptions fit;
    int threads = 0;             // 0 = resolve from environment
    StageTimes* stages = nullptr; // non-null forces a single worker
};

/// Full pipeline: distances, n cores, n projections, weights, and the
/// weighted orthogonal-distance aggregation
///   LocOut(x) = sum_y w_y(x) * od(y, x).
/// Deterministic for fixed inputs regardless of worker count.
ScoreReport locout_scores(const DataMatrix& X, const NeighborhoodParams& params,
                          CdVariant variant = CdVariant::literal,
                          const ScoreOptions& opts = {});

} // namespace locout
