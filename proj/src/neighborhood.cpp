#include "locout/neighborhood.hpp"

#include "locout/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace locout {

int NeighborhoodParams::core_size() const {
    const double ak = alpha * k;
    const double r = std::nearbyint(ak);
    if (std::abs(ak - r) < 1e-9 * std::max(1, k)) return static_cast<int>(r);
    return static_cast<int>(std::ceil(ak));
}

void NeighborhoodParams::check(Index n) const {
    if (k < 1) throw parameter_error("k must be positive, got " +
                                     std::to_string(k));
    if (!(alpha > 0.0) || alpha > 1.0)
        throw parameter_error("alpha must lie in (0, 1], got " +
                              std::to_string(alpha));
    if (k > n - 1)
        throw parameter_error("k = " + std::to_string(k) +
                              " exceeds n-1 = " + std::to_string(n - 1));
    if (core_size() < 2)
        throw parameter_error(
            "core size ceil(alpha*k) = " + std::to_string(core_size()) +
            " is too small; the core must span a space (need >= 2)");
}

bool Core::contains(Index i) const {
    return std::binary_search(members.begin(), members.end(), i);
}

std::vector<Index> knn_set(Index y, const DistanceMatrix& D, int k) {
    const Index n = D.size();
    if (k < 1 || k > n - 1)
        throw parameter_error("k must lie in [1, n-1], got k = " +
                              std::to_string(k) + " with n = " +
                              std::to_string(n));

    std::vector<std::pair<double, Index>> cand;
    cand.reserve(n - 1);
    for (Index i = 0; i < n; ++i)
        if (i != y) cand.emplace_back(D(y, i), i);

    // (distance, index) ordering breaks ties at the k-th distance by index
    std::nth_element(cand.begin(), cand.begin() + (k - 1), cand.end());
    cand.resize(k);
    std::sort(cand.begin(), cand.end());

    std::vector<Index> out(k);
    for (int t = 0; t < k; ++t) out[t] = cand[t].second;
    return out;
}

Core select_core(Index y, const DistanceMatrix& D,
                 const NeighborhoodParams& params) {
    params.check(D.size());
    const int m = params.core_size();

    Core core;
    core.initiator = y;
    core.knn = knn_set(y, D, params.k);

    // center: the neighbour with the smallest radius that already contains
    // m of the knn observations (itself at distance 0 included). Radius
    // ties are structural for mutual m-th neighbours (both profiles share
    // d(a, b)), so they are broken by the full sorted distance profile,
    // which depends on values only and survives row relabeling; identical
    // profiles fall back to the ascending row index.
    Index best = -1;
    std::vector<double> best_profile;
    std::vector<double> profile(params.k);
    for (int c = 0; c < params.k; ++c) {
        const Index xi = core.knn[c];
        for (int t = 0; t < params.k; ++t) profile[t] = D(xi, core.knn[t]);
        std::sort(profile.begin(), profile.end());
        bool better = false;
        if (best < 0 || profile[m - 1] < best_profile[m - 1]) {
            better = true;
        } else if (profile[m - 1] == best_profile[m - 1]) {
            if (profile < best_profile)
                better = true;
            else if (profile == best_profile && xi < best)
                better = true;
        }
        if (better) {
            best = xi;
            best_profile = profile;
        }
    }
    core.center = best;

    // members: the m knn observations closest to the center
    std::vector<std::pair<double, Index>> by_center(params.k);
    for (int t = 0; t < params.k; ++t)
        by_center[t] = {D(best, core.knn[t]), core.knn[t]};
    std::sort(by_center.begin(), by_center.end());
    by_center.resize(m);

    core.covering_radius = 0;
    for (const auto& [dist, idx] : by_center) {
        core.members.push_back(idx);
        core.covering_radius = std::max(core.covering_radius, dist);
    }
    std::sort(core.members.begin(), core.members.end());
    return core;
}

} // namespace locout
