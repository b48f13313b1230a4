#include "locout/simgen.hpp"

#include "locout/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace locout::simgen {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// substream tags; one independent mt19937_64 per random quantity
enum class Stream : std::uint64_t {
    mu = 0,
    rho,
    rotation,
    outlier_sigma,
    inlier_informative,
    inlier_noise,
    outlier_rows,
    outlier_informative,
    outlier_noise,
};

std::mt19937_64 stream_rng(std::uint64_t master, Stream kind, int group = 0) {
    const auto tag =
        static_cast<std::uint64_t>(kind) * 1024 + static_cast<std::uint64_t>(group);
    return std::mt19937_64(substream_seed(master, tag));
}

double uniform_in(const Interval& range, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(range.lo, range.hi);
    return u(rng);
}

// uniform on [-hi,-lo] U [lo,hi]
double signed_uniform(const Interval& magnitude, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(magnitude.lo, magnitude.hi);
    const double value = u(rng);
    std::uniform_int_distribution<int> coin(0, 1);
    return coin(rng) ? value : -value;
}

Matrix standard_normal(Index rows, Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> z(0.0, 1.0);
    Matrix out(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) out(i, j) = z(rng);
    return out;
}

// first n_out entries of a seeded Fisher-Yates shuffle of 0..size-1
std::vector<int> sample_rows(int size, int n_out, std::mt19937_64& rng) {
    std::vector<int> pool(size);
    std::iota(pool.begin(), pool.end(), 0);
    for (int t = 0; t < n_out; ++t) {
        std::uniform_int_distribution<int> pick(t, size - 1);
        std::swap(pool[t], pool[pick(rng)]);
    }
    pool.resize(n_out);
    std::sort(pool.begin(), pool.end());
    return pool;
}

// cyclic separation pattern generalized to any group count; equals the
// 3-group pattern when groups == 3
double mean_entry(int group, int j, int n_groups, double mu) {
    return j % n_groups == group ? mu : 0.0;
}

} // namespace

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t tag) {
    return splitmix64(splitmix64(master) ^ splitmix64(tag));
}

int outlier_count(double fraction, int group_size) {
    return static_cast<int>(std::floor(fraction * group_size + 0.5));
}

int SimulationConfig::n_total() const {
    int n = 0;
    for (int s : group_sizes) n += s;
    return n;
}

void SimulationConfig::check() const {
    if (group_sizes.empty())
        throw parameter_error("need at least one group");
    for (int s : group_sizes)
        if (s < 1) throw parameter_error("group sizes must be positive");
    if (p_inf < 1) throw parameter_error("p_inf must be >= 1");
    if (p_noise < 0) throw parameter_error("p_noise must be >= 0");
    if (!(outlier_fraction >= 0.0 && outlier_fraction < 1.0))
        throw parameter_error("outlier_fraction must lie in [0, 1)");
    if (!rho_range.well_ordered() || !mu_magnitude.well_ordered() ||
        !outlier_sigma_range.well_ordered())
        throw parameter_error("parameter ranges must be well-ordered");
    if (mu_magnitude.lo < 0)
        throw parameter_error("mu magnitude range must be nonnegative");
    if (outlier_sigma_range.lo <= 0)
        throw parameter_error("outlier sigma range must be positive");
    if (p_inf > 1 &&
        (rho_range.lo <= -1.0 / (p_inf - 1) || rho_range.hi >= 1.0))
        throw parameter_error("rho_range leaves the SPD region");
}

Matrix random_rotation(int d, std::mt19937_64& rng) {
    if (d < 1) throw parameter_error("rotation dimension must be >= 1");
    Matrix A = standard_normal(d, d, rng);
    Eigen::HouseholderQR<Matrix> qr(A);
    Matrix Q = qr.householderQ() * Matrix::Identity(d, d);
    const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < d; ++j)
        if (R(j, j) < 0) Q.col(j) = -Q.col(j);
    return Q;
}

Matrix group_covariance(double rho, const Matrix& Omega, int p_inf,
                        int p_noise) {
    if (p_inf < 1) throw parameter_error("p_inf must be >= 1");
    if (Omega.rows() != p_inf || Omega.cols() != p_inf)
        throw parameter_error("rotation must be p_inf x p_inf");
    if (p_inf > 1 && (rho <= -1.0 / (p_inf - 1) || rho >= 1.0))
        throw parameter_error("rho = " + std::to_string(rho) +
                              " is outside the SPD range (-1/(p_inf-1), 1)");

    Matrix equi = Matrix::Constant(p_inf, p_inf, rho);
    equi.diagonal().setOnes();

    const Index p = p_inf + p_noise;
    Matrix cov = Matrix::Zero(p, p);
    cov.topLeftCorner(p_inf, p_inf) = Omega * equi * Omega.transpose();
    cov.bottomRightCorner(p_noise, p_noise) =
        Matrix::Identity(p_noise, p_noise);
    return cov;
}

Matrix group_means(int n_groups, int p_inf, double mu) {
    if (n_groups != 3)
        throw parameter_error(
            "the separation pattern is defined for exactly 3 groups");
    if (p_inf < 1) throw parameter_error("p_inf must be >= 1");
    Matrix means(n_groups, p_inf);
    for (int g = 0; g < n_groups; ++g)
        for (int j = 0; j < p_inf; ++j)
            means(g, j) = mean_entry(g, j, n_groups, mu);
    return means;
}

LabeledDataset generate(const SimulationConfig& config) {
    config.check();
    const int n_groups = static_cast<int>(config.group_sizes.size());
    const int p_inf = config.p_inf;
    const int p_noise = config.p_noise;
    const Index p = p_inf + p_noise;
    const Index n = config.n_total();

    LabeledDataset out;
    out.provenance = config;
    out.X.values.resize(n, p);
    out.labels.assign(n, 0);
    out.group_ids.resize(n);
    for (Index j = 0; j < p; ++j)
        out.X.col_ids.push_back("x" + std::to_string(j + 1));

    {
        auto rng = stream_rng(config.seed, Stream::mu);
        out.sampled.mu = signed_uniform(config.mu_magnitude, rng);
    }

    Index base = 0;
    for (int g = 0; g < n_groups; ++g) {
        const int size = config.group_sizes[g];

        double rho;
        {
            auto rng = stream_rng(config.seed, Stream::rho, g);
            rho = uniform_in(config.rho_range, rng);
        }
        out.sampled.rho.push_back(rho);

        Matrix omega;
        {
            auto rng = stream_rng(config.seed, Stream::rotation, g);
            omega = random_rotation(p_inf, rng);
        }
        out.sampled.rotation.push_back(omega);

        Matrix equi = Matrix::Constant(p_inf, p_inf, rho);
        equi.diagonal().setOnes();
        Matrix cov_inf = omega * equi * omega.transpose();
        cov_inf = 0.5 * (cov_inf + cov_inf.transpose());
        const Matrix chol = Eigen::LLT<Matrix>(cov_inf).matrixL();

        Vector mean(p_inf);
        for (int j = 0; j < p_inf; ++j)
            mean(j) = mean_entry(g, j, n_groups, out.sampled.mu);

        {
            auto rng = stream_rng(config.seed, Stream::inlier_informative, g);
            Matrix z = standard_normal(size, p_inf, rng);
            out.X.values.block(base, 0, size, p_inf) =
                (z * chol.transpose()).rowwise() + mean.transpose();
        }
        if (p_noise > 0) {
            auto rng = stream_rng(config.seed, Stream::inlier_noise, g);
            out.X.values.block(base, p_inf, size, p_noise) =
                standard_normal(size, p_noise, rng);
        }

        double sigma;
        {
            auto rng = stream_rng(config.seed, Stream::outlier_sigma, g);
            sigma = uniform_in(config.outlier_sigma_range, rng);
        }
        out.sampled.sigma.push_back(sigma);

        const int n_out = outlier_count(config.outlier_fraction, size);
        if (n_out > 0) {
            std::vector<int> rows;
            {
                auto rng = stream_rng(config.seed, Stream::outlier_rows, g);
                rows = sample_rows(size, n_out, rng);
            }
            // scatter outliers: same mean, diagonal covariance sigma on the
            // informative block, unit on the noise block
            auto rng_inf =
                stream_rng(config.seed, Stream::outlier_informative, g);
            Matrix z_inf = standard_normal(n_out, p_inf, rng_inf);
            Matrix z_noise(n_out, p_noise);
            if (p_noise > 0) {
                auto rng_noise =
                    stream_rng(config.seed, Stream::outlier_noise, g);
                z_noise = standard_normal(n_out, p_noise, rng_noise);
            }
            const double sd = std::sqrt(sigma);
            for (int t = 0; t < n_out; ++t) {
                const Index row = base + rows[t];
                out.X.values.block(row, 0, 1, p_inf) =
                    sd * z_inf.row(t) + mean.transpose();
                if (p_noise > 0)
                    out.X.values.block(row, p_inf, 1, p_noise) = z_noise.row(t);
                out.labels[row] = 1;
            }
        } else if (config.outlier_fraction > 0) {
            out.warnings.push_back("group " + std::to_string(g) + " (size " +
                                   std::to_string(size) +
                                   ") is too small for any outlier at "
                                   "fraction " +
                                   std::to_string(config.outlier_fraction));
        }

        for (Index i = base; i < base + size; ++i) out.group_ids[i] = g;
        base += size;
    }

    if (config.distribution == Distribution::lognormal)
        out.X.values = out.X.values.array().exp();
    return out;
}

} // namespace locout::simgen
