#include "locout/data.hpp"

#include "locout/errors.hpp"
#include "locout/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <random>
#include <sstream>

namespace locout {

std::string DataMatrix::row_label(Index i) const {
    if (static_cast<std::size_t>(i) < row_ids.size()) return row_ids[i];
    return std::to_string(i);
}

std::string DataMatrix::col_label(Index j) const {
    if (static_cast<std::size_t>(j) < col_ids.size()) return col_ids[j];
    return std::to_string(j);
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& cell, std::size_t line_no,
                  std::size_t col_no) {
    const std::string t = trim(cell);
    double value = 0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || t.empty()) {
        throw parse_error("non-numeric cell '" + cell + "' at row " +
                          std::to_string(line_no) + ", column " +
                          std::to_string(col_no + 1));
    }
    return value;
}

} // namespace

LoadResult load_csv(const std::string& path, bool has_header,
                    const std::string& label_column) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open '" + path + "'");

    std::string line;
    std::vector<std::string> header;
    std::size_t line_no = 0;

    if (has_header) {
        if (!std::getline(in, line)) throw parse_error("empty file: " + path);
        ++line_no;
        for (auto& f : split_fields(line)) header.push_back(trim(f));
    }

    Index label_idx = -1;
    if (!label_column.empty()) {
        if (!has_header)
            throw parameter_error(
                "label column lookup requires a header line");
        auto it = std::find(header.begin(), header.end(), label_column);
        if (it == header.end())
            throw parse_error("label column '" + label_column +
                              "' not found in header of " + path);
        label_idx = static_cast<Index>(it - header.begin());
    }

    std::vector<std::vector<double>> rows;
    std::size_t width = has_header ? header.size() : 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() && in.peek() == EOF) break; // trailing newline
        auto fields = split_fields(line);
        if (width == 0) width = fields.size();
        if (fields.size() != width) {
            throw parse_error("row " + std::to_string(line_no) + " has " +
                              std::to_string(fields.size()) +
                              " fields, expected " + std::to_string(width));
        }
        std::vector<double> values(fields.size());
        for (std::size_t j = 0; j < fields.size(); ++j)
            values[j] = parse_cell(fields[j], line_no, j);
        rows.push_back(std::move(values));
    }
    if (rows.empty()) throw parse_error("no data rows in " + path);

    const Index n = static_cast<Index>(rows.size());
    const Index p_all = static_cast<Index>(width);
    const Index p = label_idx >= 0 ? p_all - 1 : p_all;
    if (p < 1) throw parse_error("no data columns left in " + path);

    LoadResult result;
    result.data.values.resize(n, p);
    if (label_idx >= 0) result.labels.resize(n);

    for (Index i = 0; i < n; ++i) {
        Index jj = 0;
        for (Index j = 0; j < p_all; ++j) {
            if (j == label_idx) {
                const double v = rows[i][j];
                if (v != 0.0 && v != 1.0)
                    throw parse_error(
                        "label column must contain only 0 or 1, got " +
                        std::to_string(v) + " at data row " +
                        std::to_string(i));
                result.labels[i] = static_cast<int>(v);
            } else {
                result.data.values(i, jj++) = rows[i][j];
            }
        }
        result.data.row_ids.push_back(std::to_string(i));
    }
    if (has_header) {
        for (Index j = 0; j < p_all; ++j)
            if (j != label_idx) result.data.col_ids.push_back(header[j]);
    }
    return result;
}

namespace {

// "no variation" is the exact predicate min == max, not a tolerance.
bool column_constant(const Matrix& values, Index j) {
    return values.col(j).minCoeff() == values.col(j).maxCoeff();
}

std::vector<std::vector<Index>> duplicate_groups(const Matrix& values) {
    const Index n = values.rows();
    std::vector<Index> order(n);
    for (Index i = 0; i < n; ++i) order[i] = i;
    auto row_less = [&](Index a, Index b) {
        for (Index j = 0; j < values.cols(); ++j) {
            if (values(a, j) < values(b, j)) return true;
            if (values(a, j) > values(b, j)) return false;
        }
        return a < b;
    };
    std::sort(order.begin(), order.end(), row_less);

    std::vector<std::vector<Index>> groups;
    for (Index t = 0; t < n;) {
        Index u = t + 1;
        while (u < n && (values.row(order[u]).array() ==
                         values.row(order[t]).array()).all())
            ++u;
        if (u - t > 1) {
            std::vector<Index> g(order.begin() + t, order.begin() + u);
            std::sort(g.begin(), g.end());
            groups.push_back(std::move(g));
        }
        t = u;
    }
    std::sort(groups.begin(), groups.end());
    return groups;
}

} // namespace

DataMatrix validate(const DataMatrix& X, const TiesPolicy& policy,
                    ValidationLog* log) {
    ValidationLog local;
    ValidationLog& out = log ? *log : local;

    const Index n0 = X.rows();
    const Index p0 = X.cols();
    if (n0 < 2) throw validation_error("need at least 2 observations");
    if (p0 < 1) throw validation_error("need at least 1 variable");
    if (!X.values.allFinite())
        throw validation_error("data contains NaN or infinite entries");
    if (policy.mode == TiesMode::jitter && !(policy.jitter_scale > 0))
        throw parameter_error("jitter_scale must be > 0");

    // 1. drop columns with no variation over the full dataset
    std::vector<Index> keep_cols;
    for (Index j = 0; j < p0; ++j) {
        if (column_constant(X.values, j)) {
            out.removed_columns.push_back(j);
            out.warnings.push_back("column '" + X.col_label(j) +
                                   "' has no variation and was removed");
        } else {
            keep_cols.push_back(j);
        }
    }
    if (keep_cols.empty())
        throw validation_error("all columns have zero variance");

    DataMatrix R;
    R.values.resize(n0, static_cast<Index>(keep_cols.size()));
    for (std::size_t jj = 0; jj < keep_cols.size(); ++jj) {
        R.values.col(static_cast<Index>(jj)) = X.values.col(keep_cols[jj]);
        if (!X.col_ids.empty()) R.col_ids.push_back(X.col_ids[keep_cols[jj]]);
    }
    R.row_ids = X.row_ids;

    // 2. resolve duplicate rows
    auto groups = duplicate_groups(R.values);
    if (!groups.empty()) {
        switch (policy.mode) {
        case TiesMode::error: {
            std::ostringstream msg;
            msg << "duplicate rows present:";
            for (const auto& g : groups) {
                msg << " {";
                for (std::size_t t = 0; t < g.size(); ++t)
                    msg << (t ? "," : "") << R.row_label(g[t]);
                msg << "}";
            }
            throw validation_error(msg.str());
        }
        case TiesMode::drop_duplicates: {
            std::vector<char> drop(n0, 0);
            for (const auto& g : groups)
                for (std::size_t t = 1; t < g.size(); ++t) drop[g[t]] = 1;
            std::vector<Index> keep_rows;
            for (Index i = 0; i < n0; ++i) {
                if (drop[i])
                    out.removed_rows.push_back(i);
                else
                    keep_rows.push_back(i);
            }
            out.warnings.push_back(
                std::to_string(out.removed_rows.size()) +
                " duplicate row(s) dropped");
            Matrix kept(static_cast<Index>(keep_rows.size()), R.values.cols());
            std::vector<std::string> kept_ids;
            for (std::size_t t = 0; t < keep_rows.size(); ++t) {
                kept.row(static_cast<Index>(t)) = R.values.row(keep_rows[t]);
                if (!R.row_ids.empty()) kept_ids.push_back(R.row_ids[keep_rows[t]]);
            }
            R.values = std::move(kept);
            R.row_ids = std::move(kept_ids);
            out.kept_rows = keep_rows;
            break;
        }
        case TiesMode::jitter: {
            std::mt19937_64 rng(policy.jitter_seed);
            std::normal_distribution<double> normal(0.0, 1.0);
            Vector spread(R.values.cols());
            for (Index j = 0; j < R.values.cols(); ++j) {
                spread(j) = R.values.col(j).maxCoeff() -
                            R.values.col(j).minCoeff();
            }
            for (int attempt = 0; attempt < 8 && !groups.empty(); ++attempt) {
                for (const auto& g : groups) {
                    for (std::size_t t = 1; t < g.size(); ++t) {
                        out.jittered_rows.push_back(g[t]);
                        for (Index j = 0; j < R.values.cols(); ++j)
                            R.values(g[t], j) +=
                                policy.jitter_scale * spread(j) * normal(rng);
                    }
                }
                groups = duplicate_groups(R.values);
            }
            if (!groups.empty())
                throw validation_error(
                    "jitter failed to separate duplicate rows");
            std::sort(out.jittered_rows.begin(), out.jittered_rows.end());
            out.jittered_rows.erase(std::unique(out.jittered_rows.begin(),
                                                out.jittered_rows.end()),
                                    out.jittered_rows.end());
            out.warnings.push_back(std::to_string(out.jittered_rows.size()) +
                                   " duplicate row(s) jittered");
            break;
        }
        }
    }
    if (out.kept_rows.empty()) {
        out.kept_rows.resize(R.rows());
        for (Index i = 0; i < R.rows(); ++i) out.kept_rows[i] = i;
    }
    if (R.rows() < 2)
        throw validation_error("fewer than 2 observations remain");
    return R;
}

DistanceMatrix pairwise_distances(const DataMatrix& X, int threads) {
    const Index n = X.rows();
    DistanceMatrix D;
    D.d = Matrix::Zero(n, n);

    // transpose once so each observation is a contiguous column
    const Matrix cols = X.values.transpose();
    parallel_for(0, n, resolve_threads(threads), [&](std::int64_t i) {
        for (Index j = i + 1; j < n; ++j) {
            const double dist = (cols.col(i) - cols.col(j)).norm();
            D.d(i, j) = dist;
            D.d(j, i) = dist;
        }
    });
    return D;
}

} // namespace locout
