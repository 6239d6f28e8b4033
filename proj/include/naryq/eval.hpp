#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "naryq/dataset.hpp"
#include "naryq/distance.hpp"
#include "naryq/model_io.hpp"

namespace naryq {

/// Recall@R curve for a batch of queries: recall[i] is the fraction of
/// queries whose true Euclidean 1-NN appears in the top r_grid[i] retrieved
/// ids.
struct RecallCurve {
    std::vector<int> r_grid;
    std::vector<double> recall;
};

RecallCurve recall_at_r(const std::vector<RankedList>& retrieved,
                        const std::vector<NeighborList>& truth,
                        const std::vector<int>& r_grid);

/// Trapezoidal area under recall over log2(R), normalized by the log2 span,
/// so constant recall 1 scores 1.  A single-point grid returns its recall.
double auc_recall(const RecallCurve& curve);

/// The six method labels of the benchmark (binary variants and okmeans are
/// separate labels, not separate trainers).
enum class EvalMethod { lsq_nary, lsq_binary, itq, pq, ckmeans, okmeans };

std::string eval_method_name(EvalMethod m);
EvalMethod parse_eval_method(const std::string& name);

enum class Strategy { distance_estimation, subset_indexing };

std::string strategy_name(Strategy s);
Strategy parse_strategy(const std::string& name);

/// One benchmark run: synthesize (or load) train/base/query splits, train on
/// the train split, encode base and queries, retrieve, score against exact
/// 1-NN ground truth.
struct ExperimentConfig {
    std::uint64_t seed = 1;
    int dim = 32;
    int train_count = 5000;
    int base_count = 10000;
    int query_count = 500;
    int clusters = 50;
    double spread = 0.2;
    // Optional raw-f32 paths; when set they replace the synthetic splits.
    std::string train_path;
    std::string base_path;
    std::string query_path;

    EvalMethod method = EvalMethod::lsq_nary;
    // log2 of levels per code dimension for n-ary methods; the MIH chunk
    // size b for binary methods under subset indexing.
    int bits_per_dim = 2;
    int bit_budget = 64;
    double lambda = 1.0;
    int iters = 50;

    Strategy strategy = Strategy::distance_estimation;
    int k = 100;  // candidates per query under subset indexing
    std::vector<int> r_grid = {1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
    bool emit_trace = false;  // include per-iteration reconstruction error
};

/// key = value config text, one pair per line, '#' comments.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

struct ExperimentResult {
    ExperimentConfig config;
    int code_length = 0;     // m actually used (bits for binary methods)
    int effective_bits = 0;  // bits actually spent per point
    RecallCurve curve;
    double auc = 0.0;
    double train_error = 0.0;  // reconstruction error on the train split
    std::vector<double> trace; // filled when emit_trace is set
};

ExperimentResult run_experiment(const ExperimentConfig& config);

/// Per-iteration reconstruction error on the train split; methods with a
/// trace are lsq_binary, lsq_nary, itq, okmeans and ckmeans.
std::vector<double> convergence_trace(const ExperimentConfig& config);

/// 1-NN classification accuracy using codes as features: encode both splits,
/// map through codes_as_features, classify each test point by its nearest
/// train feature.
double embedding_classification(const DataMatrix& train_features,
                                const std::vector<int>& train_labels,
                                const DataMatrix& test_features,
                                const std::vector<int>& test_labels);

/// Deterministic plain-text report: key = value lines, then R,recall CSV
/// rows.  No timings and fixed float formatting, so repeated runs produce
/// byte-identical files.
std::string format_report(const ExperimentResult& result);
void write_report(const ExperimentResult& result, const std::string& path);

/// Budget sweep reproducing the benchmark grids: budgets x bits_per_dim for
/// each method, one run_experiment per cell, emitted as CSV rows.
struct BenchConfig {
    ExperimentConfig base;
    std::vector<int> budgets = {64, 128, 256};
    std::vector<int> bits_per_dim = {1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<EvalMethod> methods = {EvalMethod::lsq_nary,
                                       EvalMethod::lsq_binary, EvalMethod::itq,
                                       EvalMethod::pq, EvalMethod::ckmeans};
};

BenchConfig parse_bench_config_file(const std::string& path);

std::string run_bench(const BenchConfig& config);

/// Shortest round-trip decimal formatting used by every report writer.
std::string format_double(double v);

} // namespace naryq
