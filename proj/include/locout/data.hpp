#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace locout {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Observation matrix: n rows (observations) x p columns (variables),
/// with optional row/column labels. Immutable by convention after
/// validation; safe to share across workers.
struct DataMatrix {
    Matrix values;
    std::vector<std::string> row_ids; // empty or size n
    std::vector<std::string> col_ids; // empty or size p

    Index rows() const { return values.rows(); }
    Index cols() const { return values.cols(); }

    std::string row_label(Index i) const;
    std::string col_label(Index j) const;
};

/// Symmetric matrix of pairwise Euclidean distances with zero diagonal.
struct DistanceMatrix {
    Matrix d;

    Index size() const { return d.rows(); }
    double operator()(Index i, Index j) const { return d(i, j); }
};

enum class TiesMode { error, jitter, drop_duplicates };

// How duplicate rows are resolved during validation. Jitter perturbs the
// later copies of each duplicate group by jitter_scale relative to the
// column spread, using jitter_seed for reproducibility.
struct TiesPolicy {
    TiesMode mode = TiesMode::error;
    double jitter_scale = 1e-9;
    std::uint64_t jitter_seed = 0;
};

struct LoadResult {
    DataMatrix data;
    std::vector<int> labels; // empty when no label column was requested
};

/// Parse a comma-separated file. Every data cell must be a real number and
/// all rows must have the same width. If label_column names a header
/// column, that column is split off as a 0/1 outlier label vector.
LoadResult load_csv(const std::string& path, bool has_header,
                    const std::string& label_column = "");

struct ValidationLog {
    std::vector<std::string> warnings;
    std::vector<Index> removed_columns;  // original column indices
    std::vector<Index> removed_rows;     // original row indices (drop mode)
    std::vector<Index> kept_rows;        // original index of each surviving row
    std::vector<Index> jittered_rows;
};

/// Enforce the DataMatrix invariants: entries finite, columns with no
/// variation removed (with a warning), duplicate rows resolved per policy.
DataMatrix validate(const DataMatrix& X, const TiesPolicy& policy,
                    ValidationLog* log = nullptr);

/// Brute-force Euclidean distance matrix, O(n^2 p). Deterministic for any
/// worker count: entry (i, j) is always computed from the same expression.
DistanceMatrix pairwise_distances(const DataMatrix& X, int threads = 1);

} // namespace locout
