#pragma once

#include "locout/data.hpp"
#include "locout/neighborhood.hpp"

namespace locout {

// Scaling of the quadratic form inside the core distance. `literal` divides
// the squared coordinates by the singular values, `mahalanobis` by their
// squares (the classical covariance weighting). Both are exposed because
// they rank observations differently.
enum class CdVariant { literal, mahalanobis };

struct FitOptions {
    // Relative singular-value cutoff: components below
    // tol_rank * sigma_max are dropped.
    double tol_rank = 1e-10;
    // When a column is constant within the core, substitute scale 1
    // instead of failing. Off by default: a collapsed scale usually
    // signals bad input.
    bool constant_column_unit_scale = false;
};

/// The local model fitted on one core: column location mu and scale sigma
/// estimated from the core rows, and the SVD of the centered/scaled core
/// matrix. V spans the core space; the singular values carry the spread of
/// the core along each direction.
struct LocalProjection {
    Vector mu;              // p
    Vector sigma;           // p, strictly positive
    Matrix V;               // p x r, orthonormal columns
    Vector singular_values; // r, positive, non-increasing
    Index rank = 0;         // r <= min(|core|-1, p)
    Core core;

    Index dim() const { return mu.size(); }
    // Divisor of the core-distance quadratic form: min(|core|-1, p).
    double cd_divisor() const;
};

/// An observation expressed relative to one local projection: its
/// coordinates inside the core space, the residual in the orthogonal
/// complement, and the two distances derived from them.
struct ProjectedPoint {
    Vector core_rep; // r
    Vector orth_rep; // p
    double cd = 0;
    double od = 0;
};

/// Estimate mu/sigma from the core rows, scale, and decompose. The sample
/// standard deviation uses divisor |core|-1. Throws degenerate_core_error
/// if a column has no variation inside the core (unless the fallback is
/// enabled).
LocalProjection fit_projection(const DataMatrix& X, const Core& core,
                               const FitOptions& opts = {});

/// Project x: with xs = (x - mu) / sigma componentwise,
///   core_rep = V' xs,  orth_rep = xs - V core_rep,
///   od = |orth_rep|,   cd = core_distance(core_rep).
/// Both representations live in scaled coordinates, so
/// xs = V core_rep + orth_rep holds exactly.
ProjectedPoint project_point(const Vector& x, const LocalProjection& P,
                             CdVariant variant = CdVariant::literal);

/// sqrt( sum_j core_rep_j^2 / d_j^power / min(|core|-1, p) ) with power 1
/// (literal) or 2 (mahalanobis).
double core_distance(const Vector& core_rep, const LocalProjection& P,
                     CdVariant variant);

/// Euclidean norm of the orthogonal residual.
double orthogonal_distance(const Vector& orth_rep);

} // namespace locout
