#include "locout/projection.hpp"

#include "locout/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>

namespace locout {

double LocalProjection::cd_divisor() const {
    const auto m = static_cast<Index>(core.members.size());
    return static_cast<double>(std::min<Index>(m - 1, dim()));
}

LocalProjection fit_projection(const DataMatrix& X, const Core& core,
                               const FitOptions& opts) {
    const auto m = static_cast<Index>(core.members.size());
    const Index p = X.cols();
    if (m < 2)
        throw degenerate_core_error("core needs at least 2 members, got " +
                                    std::to_string(m));

    Matrix rows(m, p);
    for (Index t = 0; t < m; ++t) rows.row(t) = X.values.row(core.members[t]);

    LocalProjection P;
    P.core = core;
    P.mu = rows.colwise().mean();

    Matrix centered = rows.rowwise() - P.mu.transpose();
    P.sigma.resize(p);
    for (Index j = 0; j < p; ++j) {
        if (rows.col(j).minCoeff() == rows.col(j).maxCoeff()) {
            if (!opts.constant_column_unit_scale)
                throw degenerate_core_error(
                    "column '" + X.col_label(j) +
                    "' is constant within the core of observation " +
                    std::to_string(core.initiator));
            P.sigma(j) = 1.0;
            centered.col(j).setZero();
        } else {
            P.sigma(j) = std::sqrt(centered.col(j).squaredNorm() /
                                   static_cast<double>(m - 1));
        }
    }

    Matrix scaled = centered.array().rowwise() / P.sigma.transpose().array();

    // the core matrix has at most ceil(alpha*k) rows; JacobiSVD is the
    // accuracy-first choice in that small-minimum-dimension regime
    Eigen::JacobiSVD<Matrix> svd(scaled, Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    if (!(smax > 0))
        throw degenerate_core_error(
            "core of observation " + std::to_string(core.initiator) +
            " has no variation after scaling");

    // centered rows sum to zero, so the row rank is at most m-1
    const Index max_rank = std::min<Index>(m - 1, p);
    Index r = 0;
    while (r < sv.size() && r < max_rank && sv(r) > opts.tol_rank * smax) ++r;
    if (r == 0)
        throw degenerate_core_error("core of observation " +
                                    std::to_string(core.initiator) +
                                    " is numerically rank zero");

    P.V = svd.matrixV().leftCols(r);
    P.singular_values = sv.head(r);
    P.rank = r;
    return P;
}

double core_distance(const Vector& core_rep, const LocalProjection& P,
                     CdVariant variant) {
    if (core_rep.size() != P.rank)
        throw parameter_error("core representation has " +
                              std::to_string(core_rep.size()) +
                              " entries, expected rank " +
                              std::to_string(P.rank));
    double q = 0;
    for (Index j = 0; j < P.rank; ++j) {
        const double d = P.singular_values(j);
        const double c2 = core_rep(j) * core_rep(j);
        q += variant == CdVariant::literal ? c2 / d : c2 / (d * d);
    }
    return std::sqrt(q / P.cd_divisor());
}

double orthogonal_distance(const Vector& orth_rep) { return orth_rep.norm(); }

ProjectedPoint project_point(const Vector& x, const LocalProjection& P,
                             CdVariant variant) {
    if (x.size() != P.dim())
        throw parameter_error("point has " + std::to_string(x.size()) +
                              " components, projection expects " +
                              std::to_string(P.dim()));
    ProjectedPoint out;
    const Vector xs = (x - P.mu).cwiseQuotient(P.sigma);
    out.core_rep = P.V.transpose() * xs;
    out.orth_rep = xs - P.V * out.core_rep;
    out.cd = core_distance(out.core_rep, P, variant);
    out.od = out.orth_rep.norm();
    return out;
}

} // namespace locout
