#include "locout/scoring.hpp"

#include "locout/errors.hpp"
#include "locout/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <map>
#include <string>

namespace locout {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// CD/OD rows of one projection for all n observations at once. The scaled
// residual is materialized explicitly; od via norm identities would cancel
// catastrophically for core members.
void evaluate_projection(const DataMatrix& X, const LocalProjection& P,
                         CdVariant variant, Vector& cd_row, Vector& od_row,
                         double* t_cd, double* t_od) {
    const Index n = X.rows();
    const Index p = X.cols();

    auto t0 = Clock::now();
    Matrix scaled(n, p);
    for (Index j = 0; j < p; ++j)
        scaled.col(j) = (X.values.col(j).array() - P.mu(j)) / P.sigma(j);
    Matrix reps(n, P.rank);
    reps.noalias() = scaled * P.V;

    Vector q = Vector::Zero(n);
    for (Index j = 0; j < P.rank; ++j) {
        const double d = P.singular_values(j);
        const double w = variant == CdVariant::literal ? 1.0 / d : 1.0 / (d * d);
        q += w * reps.col(j).cwiseAbs2();
    }
    cd_row = (q / P.cd_divisor()).cwiseSqrt();
    if (t_cd) *t_cd += seconds_since(t0);

    t0 = Clock::now();
    scaled.noalias() -= reps * P.V.transpose(); // orthogonal residuals
    Vector od2 = Vector::Zero(n);
    for (Index j = 0; j < p; ++j) od2 += scaled.col(j).cwiseAbs2();
    od_row = od2.cwiseSqrt();
    if (t_od) *t_od += seconds_since(t0);
}

} // namespace

ProjectionEnsemble build_ensemble(const DataMatrix& X, const DistanceMatrix& D,
                                  const NeighborhoodParams& params,
                                  CdVariant variant, const FitOptions& fit,
                                  int threads, StageTimes* stages) {
    const Index n = X.rows();
    params.check(n);
    if (stages) threads = 1; // stage timing needs a single worker

    ProjectionEnsemble E;
    E.cores.resize(n);

    auto t0 = Clock::now();
    parallel_for(0, n, threads,
                 [&](std::int64_t y) { E.cores[y] = select_core(y, D, params); });
    if (stages) stages->t_core_selection += seconds_since(t0);

    // initiators with the same member set share one fitted projection
    std::map<std::vector<Index>, int> unique_ids;
    std::vector<int> id_of(n);
    std::vector<std::vector<Index>> initiators_of;
    for (Index y = 0; y < n; ++y) {
        auto [it, fresh] = unique_ids.try_emplace(
            E.cores[y].members, static_cast<int>(initiators_of.size()));
        if (fresh) initiators_of.emplace_back();
        id_of[y] = it->second;
        initiators_of[it->second].push_back(y);
    }
    const auto n_unique = static_cast<Index>(initiators_of.size());

    std::vector<std::shared_ptr<const LocalProjection>> fitted(n_unique);
    t0 = Clock::now();
    parallel_for(0, n_unique, threads, [&](std::int64_t u) {
        const Index rep = initiators_of[u].front();
        try {
            fitted[u] = std::make_shared<const LocalProjection>(
                fit_projection(X, E.cores[rep], fit));
        } catch (const degenerate_core_error& e) {
            throw degenerate_core_error("initiator " + std::to_string(rep) +
                                        ": " + e.what());
        }
    });
    if (stages) stages->t_svd += seconds_since(t0);

    E.projections.resize(n);
    for (Index y = 0; y < n; ++y) E.projections[y] = fitted[id_of[y]];

    E.cd.resize(n, n);
    E.od.resize(n, n);
    E.core_mask.setConstant(n, n, false);
    for (Index y = 0; y < n; ++y)
        for (Index i : E.cores[y].members) E.core_mask(y, i) = true;

    double* t_cd = stages ? &stages->t_cd : nullptr;
    double* t_od = stages ? &stages->t_od : nullptr;
    parallel_for(0, n_unique, threads, [&](std::int64_t u) {
        Vector cd_row, od_row;
        evaluate_projection(X, *fitted[u], variant, cd_row, od_row, t_cd, t_od);
        for (Index y : initiators_of[u]) {
            E.cd.row(y) = cd_row.transpose();
            E.od.row(y) = od_row.transpose();
        }
    });
    return E;
}

WeightVector weights(const ProjectionEnsemble& E, Index x) {
    const Index n = E.size();
    WeightVector out;
    out.w = Vector::Zero(n);

    std::vector<Index> contributing;
    contributing.reserve(n);
    for (Index y = 0; y < n; ++y)
        if (!E.core_mask(y, x)) contributing.push_back(y);
    if (contributing.empty())
        throw scoring_error(
            "observation " + std::to_string(x) +
            " lies in every core; no projection can contribute a weight "
            "(reduce k or alpha)");

    // x exactly at a foreign core center: 1/CD diverges, so the zero-CD
    // projections absorb all mass (uniformly if several).
    std::vector<Index> zero_cd;
    for (Index y : contributing)
        if (E.cd(y, x) == 0.0) zero_cd.push_back(y);
    if (!zero_cd.empty()) {
        for (Index y : zero_cd)
            out.w(y) = 1.0 / static_cast<double>(zero_cd.size());
        return out;
    }

    double min_raw = std::numeric_limits<double>::infinity();
    for (Index y : contributing) min_raw = std::min(min_raw, 1.0 / E.cd(y, x));

    double denom = 0;
    for (Index y : contributing) denom += 1.0 / E.cd(y, x) - min_raw;

    constexpr double kDenomEps = 1e-12;
    if (denom < kDenomEps) {
        out.uniform_fallback = true;
        const double u = 1.0 / static_cast<double>(contributing.size());
        for (Index y : contributing) out.w(y) = u;
        return out;
    }
    for (Index y : contributing) out.w(y) = (1.0 / E.cd(y, x) - min_raw) / denom;
    return out;
}

ScoreReport locout_scores(const DataMatrix& X, const NeighborhoodParams& params,
                          CdVariant variant, const ScoreOptions& opts) {
    const Index n = X.rows();
    const Index p = X.cols();
    params.check(n);

    int threads = resolve_threads(opts.threads);
    if (opts.stages) threads = 1;

    ScoreReport report;
    report.params = params;
    report.variant = variant;

    if (p <= params.core_size()) {
        report.low_dimension_degenerate = true;
        report.warnings.push_back(
            "p = " + std::to_string(p) + " <= ceil(alpha*k) = " +
            std::to_string(params.core_size()) +
            ": every observation lies inside each core space, all "
            "orthogonal distances are structurally zero and the scores "
            "carry no information (returning all-zero scores)");
    }

    auto t0 = std::chrono::steady_clock::now();
    const DistanceMatrix D = pairwise_distances(X, threads);
    if (opts.stages) opts.stages->t_distances += seconds_since(t0);

    const ProjectionEnsemble E =
        build_ensemble(X, D, params, variant, opts.fit, threads, opts.stages);

    report.locout.resize(n);
    report.min_cd.resize(n);
    report.median_cd.resize(n);
    report.core_membership_count.assign(n, 0);
    std::vector<char> degenerate(n, 0);

    t0 = std::chrono::steady_clock::now();
    parallel_for(0, n, threads, [&](std::int64_t x) {
        const WeightVector wv = weights(E, x);
        degenerate[x] = wv.uniform_fallback ? 1 : 0;
        double score = 0;
        for (Index y = 0; y < n; ++y) score += wv.w(y) * E.od(y, x);
        report.locout(x) = score;

        Vector cds = E.cd.col(x);
        report.min_cd(x) = cds.minCoeff();
        std::sort(cds.begin(), cds.end());
        report.median_cd(x) = n % 2 == 1
                                  ? cds(n / 2)
                                  : 0.5 * (cds(n / 2 - 1) + cds(n / 2));
        int count = 0;
        for (Index y = 0; y < n; ++y)
            if (E.core_mask(y, x)) ++count;
        report.core_membership_count[x] = count;
    });
    if (opts.stages) opts.stages->t_weights += seconds_since(t0);

    for (Index x = 0; x < n; ++x)
        if (degenerate[x]) report.weights_degenerate.push_back(x);

    if (report.low_dimension_degenerate) report.locout.setZero();
    return report;
}

} // namespace locout
