// Command-line front end: score, simulate, evaluate, bench, profile.
// Diagnostics go to stderr; stdout and output files carry data only.
// Exit codes: 0 success, 1 usage/validation error, 2 numerical failure.

#include "locout/data.hpp"
#include "locout/errors.hpp"
#include "locout/evaluation.hpp"
#include "locout/scoring.hpp"
#include "locout/simgen.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace locout;

// full precision so downstream consumers can reproduce comparisons exactly
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw parse_error("cannot write '" + path + "'");
    return file;
}

std::vector<int> parse_int_list(const std::string& csv, const char* what) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw parameter_error(std::string("cannot parse ") + what +
                                  " entry '" + item + "'");
        }
    }
    if (out.empty())
        throw parameter_error(std::string(what) + " list is empty");
    return out;
}

CdVariant parse_variant(const std::string& name) {
    if (name == "literal") return CdVariant::literal;
    if (name == "mahalanobis") return CdVariant::mahalanobis;
    throw parameter_error("cd variant must be 'literal' or 'mahalanobis'");
}

TiesMode parse_ties(const std::string& name) {
    if (name == "error") return TiesMode::error;
    if (name == "jitter") return TiesMode::jitter;
    if (name == "drop-duplicates") return TiesMode::drop_duplicates;
    throw parameter_error(
        "ties mode must be 'error', 'jitter' or 'drop-duplicates'");
}

simgen::Distribution parse_setup(const std::string& name) {
    if (name == "normal") return simgen::Distribution::normal;
    if (name == "lognormal") return simgen::Distribution::lognormal;
    throw parameter_error("setup must be 'normal' or 'lognormal'");
}

struct ScoreArgs {
    std::string input, output, label_column, variant = "literal";
    std::string ties = "error";
    std::vector<std::string> drop_columns;
    bool has_header = false;
    bool unit_sigma_fallback = false;
    int k = 20;
    double alpha = 0.5;
    double jitter_scale = 1e-9;
    std::uint64_t seed = 0;
    int threads = 0;
};

DataMatrix drop_named_columns(const DataMatrix& X,
                              const std::vector<std::string>& names) {
    if (names.empty()) return X;
    std::vector<Index> keep;
    std::vector<std::string> missing = names;
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    for (Index j = 0; j < X.cols(); ++j) {
        const std::string label = X.col_label(j);
        const auto hit = std::find(missing.begin(), missing.end(), label);
        if (hit != missing.end())
            missing.erase(hit);
        else
            keep.push_back(j);
    }
    if (!missing.empty()) {
        std::ostringstream msg;
        msg << "column(s) to drop not found:";
        for (const auto& name : missing) msg << " '" << name << "'";
        throw parameter_error(msg.str());
    }
    if (keep.empty()) throw parameter_error("no data columns left");
    DataMatrix out;
    out.row_ids = X.row_ids;
    out.values.resize(X.rows(), static_cast<Index>(keep.size()));
    for (std::size_t t = 0; t < keep.size(); ++t) {
        out.values.col(static_cast<Index>(t)) = X.values.col(keep[t]);
        if (!X.col_ids.empty()) out.col_ids.push_back(X.col_ids[keep[t]]);
    }
    return out;
}

int cmd_score(const ScoreArgs& args) {
    auto loaded = load_csv(args.input, args.has_header, args.label_column);
    DataMatrix X = drop_named_columns(loaded.data, args.drop_columns);

    TiesPolicy policy;
    policy.mode = parse_ties(args.ties);
    policy.jitter_scale = args.jitter_scale;
    policy.jitter_seed = args.seed;

    ValidationLog log;
    X = validate(X, policy, &log);
    for (const auto& w : log.warnings) std::cerr << "warning: " << w << "\n";

    NeighborhoodParams params{args.k, args.alpha};
    ScoreOptions opts;
    opts.threads = args.threads;
    opts.fit.constant_column_unit_scale = args.unit_sigma_fallback;
    const ScoreReport report =
        locout_scores(X, params, parse_variant(args.variant), opts);
    for (const auto& w : report.warnings)
        std::cerr << "warning: " << w << "\n";

    std::ofstream file;
    std::ostream& out = open_output(args.output, file);
    out << "row_id,locout\n";
    for (Index i = 0; i < X.rows(); ++i)
        out << X.row_label(i) << "," << fmt(report.locout(i)) << "\n";
    return 0;
}

struct SimulateArgs {
    std::string setup = "normal", output;
    std::string groups = "150,150,100";
    int p_inf = 50;
    int noise = 0;
    double outlier_fraction = 0.05;
    double rho_lo = 0.1, rho_hi = 0.9;
    double mu_lo = 3.0, mu_hi = 6.0;
    double sigma_lo = 3.0, sigma_hi = 9.0;
    std::uint64_t seed = 0;
};

int cmd_simulate(const SimulateArgs& args) {
    simgen::SimulationConfig config;
    config.group_sizes = parse_int_list(args.groups, "group size");
    config.p_inf = args.p_inf;
    config.p_noise = args.noise;
    config.outlier_fraction = args.outlier_fraction;
    config.rho_range = {args.rho_lo, args.rho_hi};
    config.mu_magnitude = {args.mu_lo, args.mu_hi};
    config.outlier_sigma_range = {args.sigma_lo, args.sigma_hi};
    config.distribution = parse_setup(args.setup);
    config.seed = args.seed;

    const simgen::LabeledDataset data = simgen::generate(config);
    for (const auto& w : data.warnings) std::cerr << "warning: " << w << "\n";

    std::cerr << "provenance: seed=" << config.seed
              << " mu=" << fmt(data.sampled.mu) << " rho=[";
    for (std::size_t g = 0; g < data.sampled.rho.size(); ++g)
        std::cerr << (g ? "," : "") << fmt(data.sampled.rho[g]);
    std::cerr << "] sigma=[";
    for (std::size_t g = 0; g < data.sampled.sigma.size(); ++g)
        std::cerr << (g ? "," : "") << fmt(data.sampled.sigma[g]);
    std::cerr << "]\n";

    std::ofstream file;
    std::ostream& out = open_output(args.output, file);
    for (Index j = 0; j < data.X.cols(); ++j)
        out << data.X.col_label(j) << ",";
    out << "label,group\n";
    for (Index i = 0; i < data.X.rows(); ++i) {
        for (Index j = 0; j < data.X.cols(); ++j)
            out << fmt(data.X.values(i, j)) << ",";
        out << data.labels[i] << "," << data.group_ids[i] << "\n";
    }
    return 0;
}

struct EvaluateArgs {
    std::string scores;
    std::string labels; // file:column
};

Vector load_score_column(const std::string& path) {
    auto loaded = load_csv(path, true);
    Index col = -1;
    for (Index j = 0; j < loaded.data.cols(); ++j)
        if (loaded.data.col_label(j) == "locout") col = j;
    if (col < 0) col = loaded.data.cols() - 1; // fall back to last column
    return loaded.data.values.col(col);
}

int cmd_evaluate(const EvaluateArgs& args) {
    const auto sep = args.labels.rfind(':');
    if (sep == std::string::npos || sep + 1 == args.labels.size())
        throw parameter_error(
            "--labels expects FILE:COLUMN (e.g. data.csv:label)");
    const std::string label_file = args.labels.substr(0, sep);
    const std::string label_col = args.labels.substr(sep + 1);

    const Vector scores = load_score_column(args.scores);
    auto labeled = load_csv(label_file, true, label_col);
    if (labeled.labels.empty())
        throw parameter_error("no label column '" + label_col + "' in " +
                              label_file);

    const AucResult result = auc(scores, labeled.labels);
    std::cout << fmt(result.auc) << "\n";
    return 0;
}

struct BenchArgs {
    std::string setups = "normal";
    std::string noise = "0";
    std::string methods = "locout,knn";
    std::string knn_grid = "5,10,15,20,25,30,35,40,45,50";
    std::string groups = "150,150,100";
    std::string output;
    int p_inf = 50;
    int reps = 1;
    int k = 20;
    double alpha = 0.5;
    double outlier_fraction = 0.05;
    std::uint64_t seed = 0;
    int threads = 0;
};

int cmd_bench(const BenchArgs& args) {
    BenchmarkConfig config;
    config.params = {args.k, args.alpha};
    config.repetitions = args.reps;
    config.master_seed = args.seed;
    config.knn_grid = parse_int_list(args.knn_grid, "knn grid");
    config.threads = args.threads;

    config.run_locout = false;
    config.run_knn = false;
    std::stringstream ms(args.methods);
    std::string method;
    while (std::getline(ms, method, ',')) {
        if (method == "locout")
            config.run_locout = true;
        else if (method == "knn")
            config.run_knn = true;
        else
            throw parameter_error("unknown method '" + method +
                                  "' (expected locout and/or knn)");
    }

    std::stringstream ss(args.setups);
    std::string setup;
    std::vector<simgen::Distribution> dists;
    while (std::getline(ss, setup, ',')) dists.push_back(parse_setup(setup));
    if (dists.empty()) throw parameter_error("no setups given");

    for (auto dist : dists) {
        for (int noise : parse_int_list(args.noise, "noise dimension")) {
            simgen::SimulationConfig point;
            point.group_sizes = parse_int_list(args.groups, "group size");
            point.p_inf = args.p_inf;
            point.p_noise = noise;
            point.outlier_fraction = args.outlier_fraction;
            point.distribution = dist;
            config.grid.push_back(point);
        }
    }

    const auto report = run_benchmark(config);
    std::ofstream file;
    std::ostream& out = open_output(args.output, file);
    out << "setup,distribution,p_inf,p_noise,method,repetition,seed,auc,"
           "runtime_s\n";
    for (const auto& row : report) {
        out << row.setup << "," << row.distribution << "," << row.p_inf << ","
            << row.p_noise << "," << row.method << "," << row.repetition << ","
            << row.seed << "," << fmt(row.auc) << "," << fmt(row.runtime_s)
            << "\n";
    }
    return 0;
}

struct ProfileArgs {
    int n = 100;
    int p = 500;
    int k = 40;
    double alpha = 0.5;
    int reps = 3;
    std::uint64_t seed = 0;
    std::string output;
};

int cmd_profile(const ProfileArgs& args) {
    if (args.n < 3) throw parameter_error("need n >= 3");
    if (args.p < 1) throw parameter_error("need p >= 1");

    // synthetic standard-normal instance of the requested size
    std::mt19937_64 rng(args.seed);
    std::normal_distribution<double> z(0.0, 1.0);
    DataMatrix X;
    X.values.resize(args.n, args.p);
    for (Index i = 0; i < args.n; ++i)
        for (Index j = 0; j < args.p; ++j) X.values(i, j) = z(rng);

    NeighborhoodParams params{args.k, args.alpha};
    const RuntimeProfile prof =
        median_profile(X, params, CdVariant::literal, args.reps);

    std::ofstream file;
    std::ostream& out = open_output(args.output, file);
    out << "n,p,k,t_distances,t_core_selection,t_svd,t_cd,t_od,t_weights,"
           "t_total\n";
    out << prof.n << "," << prof.p << "," << prof.k << ","
        << fmt(prof.t_distances) << "," << fmt(prof.t_core_selection) << ","
        << fmt(prof.t_svd) << "," << fmt(prof.t_cd) << "," << fmt(prof.t_od)
        << "," << fmt(prof.t_weights) << "," << fmt(prof.t_total) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Local-projections outlier detection"};
    app.require_subcommand(1);

    ScoreArgs score;
    auto* sc = app.add_subcommand(
        "score", "Score a CSV dataset by local-projection outlyingness");
    sc->add_option("--input", score.input, "input CSV")->required();
    sc->add_option("--output,-o", score.output, "output CSV (default stdout)");
    sc->add_flag("--has-header", score.has_header, "first line is a header");
    sc->add_option("--label-column", score.label_column,
                   "header column to strip as 0/1 labels");
    sc->add_option("--drop-column", score.drop_columns,
                   "header column(s) to drop before scoring");
    sc->add_option("--k", score.k, "number of nearest neighbours");
    sc->add_option("--alpha", score.alpha, "core trimming proportion");
    sc->add_option("--cd-variant", score.variant, "literal|mahalanobis");
    sc->add_option("--ties", score.ties, "error|jitter|drop-duplicates");
    sc->add_option("--jitter-scale", score.jitter_scale,
                   "relative jitter magnitude");
    sc->add_flag("--unit-sigma-fallback", score.unit_sigma_fallback,
                 "treat per-core constant columns as unscaled");
    sc->add_option("--seed", score.seed, "seed (jitter mode)");
    sc->add_option("--threads", score.threads,
                   "worker count (default: LOCOUT_THREADS or all cores)");

    SimulateArgs sim;
    auto* si = app.add_subcommand("simulate",
                                  "Generate a labeled benchmark dataset");
    si->add_option("--setup", sim.setup, "normal|lognormal");
    si->add_option("--noise", sim.noise, "number of noise variables");
    si->add_option("--p-inf", sim.p_inf, "number of informative variables");
    si->add_option("--groups", sim.groups, "comma-separated group sizes");
    si->add_option("--outlier-fraction", sim.outlier_fraction,
                   "fraction replaced per group");
    si->add_option("--rho-min", sim.rho_lo, "correlation range low");
    si->add_option("--rho-max", sim.rho_hi, "correlation range high");
    si->add_option("--mu-min", sim.mu_lo, "separation magnitude low");
    si->add_option("--mu-max", sim.mu_hi, "separation magnitude high");
    si->add_option("--sigma-min", sim.sigma_lo, "outlier variance low");
    si->add_option("--sigma-max", sim.sigma_hi, "outlier variance high");
    si->add_option("--seed", sim.seed, "master seed");
    si->add_option("--output,-o", sim.output, "output CSV (default stdout)");

    EvaluateArgs eval;
    auto* ev = app.add_subcommand("evaluate",
                                  "AUC of a score file against labels");
    ev->add_option("--scores", eval.scores, "score CSV (row_id,locout)")
        ->required();
    ev->add_option("--labels", eval.labels, "FILE:COLUMN with 0/1 labels")
        ->required();

    BenchArgs bench;
    auto* be = app.add_subcommand("bench", "Simulation benchmark grid");
    be->add_option("--setups", bench.setups, "comma list: normal,lognormal");
    be->add_option("--noise", bench.noise, "comma list of noise dimensions");
    be->add_option("--methods", bench.methods, "comma list: locout,knn");
    be->add_option("--reps", bench.reps, "repetitions per grid point");
    be->add_option("--groups", bench.groups, "comma-separated group sizes");
    be->add_option("--p-inf", bench.p_inf, "informative dimension");
    be->add_option("--outlier-fraction", bench.outlier_fraction,
                   "fraction replaced per group");
    be->add_option("--k", bench.k, "LocOut neighbourhood size");
    be->add_option("--alpha", bench.alpha, "LocOut trimming proportion");
    be->add_option("--knn-grid", bench.knn_grid, "baseline k sweep");
    be->add_option("--seed", bench.seed, "master seed");
    be->add_option("--threads", bench.threads, "worker count");
    be->add_option("--output,-o", bench.output, "report CSV (default stdout)");

    ProfileArgs prof;
    auto* pr = app.add_subcommand("profile", "Stage-decomposed runtime");
    pr->add_option("--n", prof.n, "observations");
    pr->add_option("--p", prof.p, "variables");
    pr->add_option("--k", prof.k, "neighbourhood size");
    pr->add_option("--alpha", prof.alpha, "trimming proportion");
    pr->add_option("--reps", prof.reps, "runs to take the median over");
    pr->add_option("--seed", prof.seed, "instance seed");
    pr->add_option("--output,-o", prof.output, "output CSV (default stdout)");

    try {
        app.parse(argc, argv);
        if (sc->parsed()) return cmd_score(score);
        if (si->parsed()) return cmd_simulate(sim);
        if (ev->parsed()) return cmd_evaluate(eval);
        if (be->parsed()) return cmd_bench(bench);
        if (pr->parsed()) return cmd_profile(prof);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const parameter_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const degenerate_core_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const scoring_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
