#pragma once

#include "locout/data.hpp"
#include "locout/neighborhood.hpp"
#include "locout/projection.hpp"
#include "locout/simgen.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace locout {

struct AucResult {
    double auc = 0;
    Index n_pos = 0;
    Index n_neg = 0;
};

/// Area under the ROC curve in the rank (Mann-Whitney) formulation, with
/// half credit for tied scores. Requires both classes to be present.
AucResult auc(const Vector& scores, const std::vector<int>& labels);

/// KNN outlier baseline: score(i) = distance from i to its k-th nearest
/// other observation.
Vector knn_baseline(const DistanceMatrix& D, int k);

struct RuntimeProfile {
    double t_distances = 0;
    double t_core_selection = 0;
    double t_svd = 0;
    double t_cd = 0;
    double t_od = 0;
    double t_weights = 0;
    double t_total = 0;
    Index n = 0;
    Index p = 0;
    int k = 0;

    double stage_sum() const;
};

/// Run the full scoring pipeline once on a single worker and report
/// wall-clock time per stage.
RuntimeProfile profile(const DataMatrix& X, const NeighborhoodParams& params,
                       CdVariant variant = CdVariant::literal);

/// Fieldwise median of repeated profiles of the same instance.
RuntimeProfile median_profile(const DataMatrix& X,
                              const NeighborhoodParams& params,
                              CdVariant variant, int repetitions);

struct BenchmarkConfig {
    std::vector<simgen::SimulationConfig> grid;
    NeighborhoodParams params;        // LocOut parameters
    bool run_locout = true;
    bool run_knn = true;
    int repetitions = 1;
    std::uint64_t master_seed = 0;
    // The baseline's k is swept and the best AUC reported.
    std::vector<int> knn_grid{5, 10, 15, 20, 25, 30, 35, 40, 45, 50};
    int threads = 0;
};

struct BenchmarkRow {
    int setup = 1; // 1 = normal, 2 = lognormal
    std::string distribution;
    int p_inf = 0;
    int p_noise = 0;
    std::string method;
    int repetition = 0;
    std::uint64_t seed = 0;
    double auc = 0;
    double runtime_s = 0;
};

/// For every grid point and repetition: generate a dataset (seed derived
/// from master_seed and the repetition only, so grid points are paired),
/// score it with each method, and report AUC and runtime in long format.
std::vector<BenchmarkRow> run_benchmark(const BenchmarkConfig& config);

} // namespace locout
