#include "locout/data.hpp"
#include "locout/errors.hpp"
#include "locout/projection.hpp"

#include "naive_reference.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace locout;

namespace {

DataMatrix gaussian_data(Index n, Index p, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    DataMatrix X;
    X.values.resize(n, p);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j) X.values(i, j) = z(rng);
    return X;
}

Core core_of(std::vector<Index> members, Index initiator) {
    Core core;
    core.initiator = initiator;
    core.center = members.front();
    core.knn = members;
    core.members = std::move(members);
    std::sort(core.members.begin(), core.members.end());
    return core;
}

Vector scale_point(const LocalProjection& P, const Vector& x) {
    return (x - P.mu).cwiseQuotient(P.sigma);
}

} // namespace

TEST_CASE("fit_projection estimates the core column mean") {
    DataMatrix X;
    X.values.resize(4, 2);
    X.values << 0, 0, 2, 0, 1, 3, 50, 50; // last row is not in the core
    const auto P = fit_projection(X, core_of({0, 1, 2}, 3));
    CHECK(P.mu(0) == doctest::Approx(1.0));
    CHECK(P.mu(1) == doctest::Approx(1.0));
}

TEST_CASE("fit_projection reconstructs the scaled core matrix") {
    const auto X = gaussian_data(12, 7, 3);
    const auto P = fit_projection(X, core_of({0, 2, 3, 5, 8, 11}, 1));

    const auto m = static_cast<Index>(P.core.members.size());
    Matrix scaled(m, X.cols());
    for (Index t = 0; t < m; ++t)
        scaled.row(t) =
            scale_point(P, X.values.row(P.core.members[t]).transpose())
                .transpose();

    // U recovered as scaled * V * D^-1, then U D V' must give scaled back
    const Matrix U =
        scaled * P.V * P.singular_values.cwiseInverse().asDiagonal();
    const Matrix rebuilt =
        U * P.singular_values.asDiagonal() * P.V.transpose();
    CHECK((rebuilt - scaled).cwiseAbs().maxCoeff() <= 1e-10);

    SUBCASE("V has orthonormal columns") {
        const Matrix gram = P.V.transpose() * P.V;
        CHECK((gram - Matrix::Identity(P.rank, P.rank)).cwiseAbs().maxCoeff() <=
              1e-10);
    }
    SUBCASE("singular values positive and non-increasing") {
        for (Index j = 0; j < P.rank; ++j) {
            CHECK(P.singular_values(j) > 0);
            if (j > 0) CHECK(P.singular_values(j) <= P.singular_values(j - 1));
        }
    }
}

TEST_CASE("fit_projection on a flat core: rank m-1, unit column variances") {
    const auto X = gaussian_data(10, 50, 4);
    std::vector<Index> members(10);
    for (Index i = 0; i < 10; ++i) members[i] = i;
    const auto P = fit_projection(X, core_of(members, 0));
    CHECK(P.rank == 9);

    // scaled core columns have unit sample variance, checked directly
    for (Index j = 0; j < X.cols(); ++j) {
        double mean = 0;
        for (Index i = 0; i < 10; ++i) mean += X.values(i, j);
        mean /= 10.0;
        double ss = 0;
        for (Index i = 0; i < 10; ++i) {
            const double s = (X.values(i, j) - P.mu(j)) / P.sigma(j);
            ss += s * s;
        }
        CHECK(P.mu(j) == doctest::Approx(mean).epsilon(1e-12));
        CHECK(ss / 9.0 == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("fit_projection rejects degenerate cores") {
    auto X = gaussian_data(6, 3, 9);
    X.values.col(1).setConstant(4.2); // constant inside any core
    CHECK_THROWS_AS(fit_projection(X, core_of({0, 1, 2, 3}, 4)),
                    degenerate_core_error);

    SUBCASE("unit-scale fallback keeps going") {
        FitOptions opts;
        opts.constant_column_unit_scale = true;
        const auto P = fit_projection(X, core_of({0, 1, 2, 3}, 4), opts);
        CHECK(P.sigma(1) == 1.0);
        CHECK(P.rank >= 1);
    }
    SUBCASE("cores below two members are rejected") {
        CHECK_THROWS_AS(fit_projection(X, core_of({0}, 4)),
                        degenerate_core_error);
    }
}

TEST_CASE("project_point at the center gives all zeros") {
    const auto X = gaussian_data(9, 5, 13);
    const auto P = fit_projection(X, core_of({1, 3, 4, 6}, 0));
    const auto proj = project_point(P.mu, P);
    CHECK(proj.core_rep.cwiseAbs().maxCoeff() == 0.0);
    CHECK(proj.orth_rep.cwiseAbs().maxCoeff() == 0.0);
    CHECK(proj.cd == 0.0);
    CHECK(proj.od == 0.0);
}

TEST_CASE("core members have zero orthogonal distance") {
    const auto X = gaussian_data(14, 30, 21);
    const auto P = fit_projection(X, core_of({0, 2, 5, 7, 9, 12}, 1));
    for (Index t : P.core.members) {
        const auto proj = project_point(X.values.row(t).transpose(), P);
        CHECK(proj.od <= 1e-8);
    }
}

TEST_CASE("project_point matches the explicit projector oracle") {
    const auto X = gaussian_data(8, 6, 33);
    const std::vector<Index> members{1, 2, 4, 6};
    const auto P = fit_projection(X, core_of(members, 0));
    const auto model = naive::fit(X.values, members);

    std::mt19937_64 rng(77);
    std::normal_distribution<double> z;
    for (int rep = 0; rep < 10; ++rep) {
        Vector x(6);
        for (Index j = 0; j < 6; ++j) x(j) = 3 * z(rng);
        const auto proj = project_point(x, P);

        const Vector xs = scale_point(P, x);
        const Vector orth_oracle = xs - model.projector * xs;
        CHECK((proj.orth_rep - orth_oracle).cwiseAbs().maxCoeff() <= 1e-10);

        // core_rep coordinates are basis-dependent; compare projections
        const Vector back = P.V * proj.core_rep;
        const Vector back_oracle = model.projector * xs;
        CHECK((back - back_oracle).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK(proj.od == doctest::Approx(naive::od(model, x)).epsilon(1e-10));
        CHECK(proj.cd ==
              doctest::Approx(naive::cd(model, x, false)).epsilon(1e-10));
    }
}

TEST_CASE("exact decomposition in scaled coordinates") {
    const auto X = gaussian_data(16, 12, 41);
    const auto P = fit_projection(X, core_of({0, 3, 5, 8, 10, 13, 15}, 2));
    for (Index i = 0; i < X.rows(); ++i) {
        const Vector x = X.values.row(i).transpose();
        const auto proj = project_point(x, P);
        const Vector rebuilt = P.V * proj.core_rep + proj.orth_rep;
        const Vector xs = scale_point(P, x);
        CHECK((rebuilt - xs).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK(proj.od ==
              doctest::Approx(orthogonal_distance(proj.orth_rep))
                  .epsilon(1e-12));
    }
}

TEST_CASE("full-rank core space leaves no orthogonal residual") {
    // p = 3 <= m-1 = 5: the core spans everything
    const auto X = gaussian_data(10, 3, 55);
    const auto P = fit_projection(X, core_of({0, 1, 2, 4, 6, 8}, 3));
    CHECK(P.rank == 3);
    for (Index i = 0; i < X.rows(); ++i) {
        const auto proj = project_point(X.values.row(i).transpose(), P);
        CHECK(proj.orth_rep.cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("core_distance hand-checked on a rank-1 projection") {
    LocalProjection P;
    P.mu = Vector::Zero(1);
    P.sigma = Vector::Ones(1);
    P.V = Matrix::Identity(1, 1);
    P.singular_values = Vector::Constant(1, 4.0);
    P.rank = 1;
    P.core = core_of({0, 1}, 2); // divisor min(m-1, p) = 1

    Vector rep = Vector::Constant(1, 2.0);
    CHECK(core_distance(rep, P, CdVariant::literal) == doctest::Approx(1.0));
    CHECK(core_distance(rep, P, CdVariant::mahalanobis) ==
          doctest::Approx(0.5));
    CHECK(core_distance(Vector::Zero(1), P, CdVariant::literal) == 0.0);
    CHECK(core_distance(Vector::Zero(1), P, CdVariant::mahalanobis) == 0.0);
}

TEST_CASE("mahalanobis variant against an explicit covariance inverse") {
    // non-flat: p = 3 < m-1 = 5, so the core space is all of R^3 and the
    // projected scatter matrix can be inverted directly
    const auto X = gaussian_data(9, 3, 61);
    const std::vector<Index> members{0, 1, 3, 5, 6, 8};
    const auto P = fit_projection(X, core_of(members, 2));
    const auto m = static_cast<Index>(members.size());

    Matrix scaled(m, 3);
    for (Index t = 0; t < m; ++t)
        scaled.row(t) =
            scale_point(P, X.values.row(members[t]).transpose()).transpose();
    const Matrix sample_cov =
        scaled.transpose() * scaled / static_cast<double>(m - 1);
    const Matrix cov_inv = sample_cov.inverse();

    for (Index t : members) {
        const Vector xs = scale_point(P, X.values.row(t).transpose());
        const double md = std::sqrt(xs.dot(cov_inv * xs));
        const auto proj =
            project_point(X.values.row(t).transpose(), P,
                          CdVariant::mahalanobis);
        // cd = md / sqrt((m-1) * min(m-1, p)) by the divisor convention
        const double expected =
            md / std::sqrt(static_cast<double>(m - 1) * P.cd_divisor());
        CHECK(proj.cd == doctest::Approx(expected).epsilon(1e-8));
    }
}

TEST_CASE("orthogonal_distance basics") {
    CHECK(orthogonal_distance(Vector::Zero(4)) == 0.0);
    Vector v(4);
    v << 3, 4, 0, 0;
    CHECK(orthogonal_distance(v) == doctest::Approx(5.0).epsilon(1e-15));

    std::mt19937_64 rng(3);
    std::normal_distribution<double> z;
    Vector w(40);
    for (Index j = 0; j < 40; ++j) w(j) = z(rng);
    long double ss = 0;
    for (Index j = 0; j < 40; ++j)
        ss += static_cast<long double>(w(j)) * static_cast<long double>(w(j));
    CHECK(orthogonal_distance(w) ==
          doctest::Approx(static_cast<double>(std::sqrt(ss))).epsilon(1e-12));
}

TEST_CASE("CD and OD invariant under translation and global scaling") {
    const auto X = gaussian_data(15, 20, 71);
    const std::vector<Index> members{0, 2, 4, 7, 9, 11, 14};
    const auto P = fit_projection(X, core_of(members, 1));

    std::mt19937_64 rng(5);
    std::normal_distribution<double> z;
    Vector shift(20);
    for (Index j = 0; j < 20; ++j) shift(j) = 10 * z(rng);

    SUBCASE("translation") {
        DataMatrix Y = X;
        Y.values.rowwise() += shift.transpose();
        const auto Q = fit_projection(Y, core_of(members, 1));
        for (Index i = 0; i < X.rows(); ++i) {
            const auto a = project_point(X.values.row(i).transpose(), P);
            const auto b = project_point(Y.values.row(i).transpose(), Q);
            CHECK(b.cd == doctest::Approx(a.cd).epsilon(1e-8));
            CHECK(b.od == doctest::Approx(a.od).epsilon(1e-8));
        }
    }
    SUBCASE("global scaling") {
        const double s = 0.037;
        DataMatrix Y = X;
        Y.values *= s;
        const auto Q = fit_projection(Y, core_of(members, 1));
        for (Index i = 0; i < X.rows(); ++i) {
            const auto a = project_point(X.values.row(i).transpose(), P);
            const auto b = project_point(Y.values.row(i).transpose(), Q);
            CHECK(b.cd == doctest::Approx(a.cd).epsilon(1e-8));
            CHECK(b.od == doctest::Approx(a.od).epsilon(1e-8));
        }
    }
}

TEST_CASE("project_point rejects dimension mismatches") {
    const auto X = gaussian_data(8, 5, 81);
    const auto P = fit_projection(X, core_of({0, 1, 2, 3}, 4));
    CHECK_THROWS_AS(project_point(Vector::Zero(4), P), parameter_error);
}

TEST_CASE("core members separate better in higher dimensions") {
    // fraction of (core member, non-core) pairs where the member has the
    // larger core distance; grows with p on single-Gaussian data
    auto fraction_at = [](Index p, unsigned seed) {
        const auto X = gaussian_data(40, p, seed);
        const auto D = pairwise_distances(X);
        NeighborhoodParams params{18, 0.5}; // core size 9
        double hits = 0, total = 0;
        for (Index y = 0; y < X.rows(); ++y) {
            const auto core = select_core(y, D, params);
            const auto P = fit_projection(X, core);
            Vector cds(X.rows());
            for (Index i = 0; i < X.rows(); ++i)
                cds(i) =
                    project_point(X.values.row(i).transpose(), P).cd;
            for (Index m : core.members) {
                for (Index zp = 0; zp < X.rows(); ++zp) {
                    if (core.contains(zp)) continue;
                    hits += cds(m) > cds(zp) ? 1 : 0;
                    total += 1;
                }
            }
        }
        return hits / total;
    };

    std::vector<double> low, high;
    for (unsigned seed = 1; seed <= 5; ++seed) {
        low.push_back(fraction_at(20, seed));
        high.push_back(fraction_at(400, seed));
    }
    std::sort(low.begin(), low.end());
    std::sort(high.begin(), high.end());
    CHECK(high[2] > low[2]); // medians over the 5 seeds
}
