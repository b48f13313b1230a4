#pragma once

#include "locout/data.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace locout::simgen {

struct Interval {
    double lo = 0;
    double hi = 0;

    bool well_ordered() const { return lo <= hi; }
};

enum class Distribution { normal, lognormal };

// Three-group mixture benchmark: per group a randomly rotated
// equicorrelation covariance on the informative block, identity on the
// noise block, and a cyclic mean pattern separating the groups. A fraction
// of each group is replaced by scatter outliers that keep the group mean
// but inflate the informative variances.
struct SimulationConfig {
    std::vector<int> group_sizes{150, 150, 100};
    int p_inf = 50;
    int p_noise = 0;
    Interval rho_range{0.1, 0.9};
    // Separation mu is drawn uniformly from [-hi,-lo] U [lo,hi].
    Interval mu_magnitude{3.0, 6.0};
    double outlier_fraction = 0.05;
    Interval outlier_sigma_range{3.0, 9.0}; // variance of informative coords
    Distribution distribution = Distribution::normal;
    std::uint64_t seed = 0;

    int n_total() const;
    void check() const; // throws parameter_error
};

// Parameters drawn while generating one dataset, kept for provenance.
struct SampledParams {
    double mu = 0;
    std::vector<double> rho;      // one per group
    std::vector<double> sigma;    // one per group (outlier variance)
    std::vector<Matrix> rotation; // one per group, p_inf x p_inf
};

struct LabeledDataset {
    DataMatrix X;
    std::vector<int> labels;    // 1 = injected outlier
    std::vector<int> group_ids; // group index per row
    SimulationConfig provenance;
    SampledParams sampled;
    std::vector<std::string> warnings;
};

/// Haar-ish random rotation: QR of a square standard-normal matrix with
/// the R-diagonal sign fix. Q'Q = I within 1e-10.
Matrix random_rotation(int d, std::mt19937_64& rng);

/// Block-diagonal SPD covariance: Omega * E(rho) * Omega' on the
/// informative block (E = unit diagonal, rho off-diagonal), identity on
/// the noise block. rho must lie in (-1/(p_inf-1), 1).
Matrix group_covariance(double rho, const Matrix& Omega, int p_inf,
                        int p_noise);

/// The 3-group cyclic mean pattern: informative coordinate j of group g is
/// mu when j mod 3 == g, else 0. Noise coordinates are always zero (the
/// returned matrix covers the informative block only).
Matrix group_means(int n_groups, int p_inf, double mu);

/// Generate one labeled dataset. Fully reproducible from config.seed; each
/// random quantity (rho, rotation, inlier draws, noise draws, outlier
/// placement, outlier draws) has its own substream, so e.g. changing
/// p_noise does not perturb the informative draws.
LabeledDataset generate(const SimulationConfig& config);

/// Derive an independent substream seed from a master seed and a tag.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t tag);

/// round-half-up(outlier_fraction * group_size); the per-group outlier
/// count. Zero (with a warning upstream) when the group is too small.
int outlier_count(double fraction, int group_size);

} // namespace locout::simgen
