#include "locout/evaluation.hpp"

#include "locout/errors.hpp"
#include "locout/parallel.hpp"
#include "locout/scoring.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

namespace locout {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

AucResult auc(const Vector& scores, const std::vector<int>& labels) {
    const Index n = scores.size();
    if (static_cast<Index>(labels.size()) != n)
        throw validation_error("scores and labels differ in length (" +
                               std::to_string(n) + " vs " +
                               std::to_string(labels.size()) + ")");

    AucResult out;
    for (int l : labels) {
        if (l == 1)
            ++out.n_pos;
        else if (l == 0)
            ++out.n_neg;
        else
            throw validation_error("labels must be 0 or 1");
    }
    if (out.n_pos == 0 || out.n_neg == 0)
        throw validation_error(
            "AUC needs at least one outlier and one inlier label");

    // rank formulation with midranks; twice_rank_sum keeps the tie halves
    // exact in integer arithmetic
    std::vector<Index> order(n);
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        return scores(a) < scores(b);
    });

    std::uint64_t twice_rank_sum = 0;
    Index t = 0;
    while (t < n) {
        Index u = t;
        while (u < n && scores(order[u]) == scores(order[t])) ++u;
        // midrank of the tie block [t, u) in 1-based ranks, doubled
        const std::uint64_t twice_midrank =
            static_cast<std::uint64_t>(t + 1) + static_cast<std::uint64_t>(u);
        for (Index s = t; s < u; ++s)
            if (labels[order[s]] == 1) twice_rank_sum += twice_midrank;
        t = u;
    }

    const auto np = static_cast<std::uint64_t>(out.n_pos);
    const auto nn = static_cast<std::uint64_t>(out.n_neg);
    const std::uint64_t twice_u = twice_rank_sum - np * (np + 1);
    out.auc = static_cast<double>(twice_u) / static_cast<double>(2 * np * nn);
    return out;
}

Vector knn_baseline(const DistanceMatrix& D, int k) {
    const Index n = D.size();
    if (k < 1 || k > n - 1)
        throw parameter_error("baseline k must lie in [1, n-1], got " +
                              std::to_string(k));
    Vector scores(n);
    std::vector<double> dist(n - 1);
    for (Index i = 0; i < n; ++i) {
        Index t = 0;
        for (Index j = 0; j < n; ++j)
            if (j != i) dist[t++] = D(i, j);
        std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
        scores(i) = dist[k - 1];
    }
    return scores;
}

double RuntimeProfile::stage_sum() const {
    return t_distances + t_core_selection + t_svd + t_cd + t_od + t_weights;
}

RuntimeProfile profile(const DataMatrix& X, const NeighborhoodParams& params,
                       CdVariant variant) {
    StageTimes stages;
    ScoreOptions opts;
    opts.threads = 1;
    opts.stages = &stages;

    const auto t0 = Clock::now();
    (void)locout_scores(X, params, variant, opts);
    const double total = seconds_since(t0);

    RuntimeProfile out;
    out.t_distances = stages.t_distances;
    out.t_core_selection = stages.t_core_selection;
    out.t_svd = stages.t_svd;
    out.t_cd = stages.t_cd;
    out.t_od = stages.t_od;
    out.t_weights = stages.t_weights;
    out.t_total = total;
    out.n = X.rows();
    out.p = X.cols();
    out.k = params.k;
    return out;
}

RuntimeProfile median_profile(const DataMatrix& X,
                              const NeighborhoodParams& params,
                              CdVariant variant, int repetitions) {
    if (repetitions < 1)
        throw parameter_error("repetitions must be >= 1");
    std::vector<RuntimeProfile> runs;
    runs.reserve(repetitions);
    for (int r = 0; r < repetitions; ++r)
        runs.push_back(profile(X, params, variant));

    auto med = [&](double RuntimeProfile::* field) {
        std::vector<double> values;
        for (const auto& run : runs) values.push_back(run.*field);
        return median_of(std::move(values));
    };

    RuntimeProfile out = runs.front();
    out.t_distances = med(&RuntimeProfile::t_distances);
    out.t_core_selection = med(&RuntimeProfile::t_core_selection);
    out.t_svd = med(&RuntimeProfile::t_svd);
    out.t_cd = med(&RuntimeProfile::t_cd);
    out.t_od = med(&RuntimeProfile::t_od);
    out.t_weights = med(&RuntimeProfile::t_weights);
    out.t_total = med(&RuntimeProfile::t_total);
    return out;
}

std::vector<BenchmarkRow> run_benchmark(const BenchmarkConfig& config) {
    if (config.repetitions < 1)
        throw parameter_error("repetitions must be >= 1");
    if (config.grid.empty())
        throw parameter_error("benchmark grid is empty");
    if (!config.run_locout && !config.run_knn)
        throw parameter_error("no method selected");

    std::vector<BenchmarkRow> report;
    for (const auto& point : config.grid) {
        for (int rep = 0; rep < config.repetitions; ++rep) {
            // the dataset seed depends on the repetition only, so grid
            // points and setups share matched draws
            simgen::SimulationConfig cfg = point;
            cfg.seed = simgen::substream_seed(config.master_seed,
                                              static_cast<std::uint64_t>(rep));
            const simgen::LabeledDataset data = simgen::generate(cfg);
            const int setup =
                cfg.distribution == simgen::Distribution::normal ? 1 : 2;
            const std::string dist_name = setup == 1 ? "normal" : "lognormal";

            BenchmarkRow base;
            base.setup = setup;
            base.distribution = dist_name;
            base.p_inf = cfg.p_inf;
            base.p_noise = cfg.p_noise;
            base.repetition = rep;
            base.seed = cfg.seed;

            if (config.run_locout) {
                BenchmarkRow row = base;
                row.method = "locout";
                const auto t0 = Clock::now();
                ScoreOptions opts;
                opts.threads = config.threads;
                const ScoreReport scores =
                    locout_scores(data.X, config.params, CdVariant::literal,
                                  opts);
                row.runtime_s = seconds_since(t0);
                row.auc = auc(scores.locout, data.labels).auc;
                report.push_back(std::move(row));
            }
            if (config.run_knn) {
                BenchmarkRow row = base;
                row.method = "knn";
                const auto t0 = Clock::now();
                const DistanceMatrix D =
                    pairwise_distances(data.X, config.threads);
                double best = 0;
                bool any = false;
                for (int k : config.knn_grid) {
                    if (k < 1 || k > data.X.rows() - 1) continue;
                    const Vector scores = knn_baseline(D, k);
                    best = std::max(best, auc(scores, data.labels).auc);
                    any = true;
                }
                if (!any)
                    throw parameter_error(
                        "knn grid has no feasible k for n = " +
                        std::to_string(data.X.rows()));
                row.runtime_s = seconds_since(t0);
                row.auc = best;
                report.push_back(std::move(row));
            }
        }
    }
    return report;
}

} // namespace locout
