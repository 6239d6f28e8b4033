#include "naryq/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "naryq/detail/text.hpp"
#include "naryq/features.hpp"
#include "naryq/itq.hpp"
#include "naryq/lsq.hpp"
#include "naryq/mih.hpp"
#include "naryq/quantizer.hpp"
#include "naryq/subspace.hpp"

namespace naryq {

RecallCurve recall_at_r(const std::vector<RankedList>& retrieved,
                        const std::vector<NeighborList>& truth,
                        const std::vector<int>& r_grid) {
    if (retrieved.size() != truth.size())
        throw_arg("one ranked list per ground-truth query required");
    if (retrieved.empty()) throw_arg("recall needs at least one query");
    if (r_grid.empty()) throw_arg("recall needs a nonempty R grid");
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        if (r_grid[i] < 1 || (i > 0 && r_grid[i] <= r_grid[i - 1]))
            throw_arg("R grid must be ascending positive");
    }

    RecallCurve curve;
    curve.r_grid = r_grid;
    curve.recall.resize(r_grid.size(), 0.0);
    for (std::size_t q = 0; q < truth.size(); ++q) {
        if (truth[q].ids.empty()) throw_arg("ground truth misses a neighbor");
        const int nn = static_cast<int>(truth[q].ids.front());
        // Retrieved lists are nested prefixes, so find the hit rank once.
        const auto& ids = retrieved[q].ids;
        int rank = -1;
        for (std::size_t r = 0; r < ids.size(); ++r) {
            if (ids[r] == nn) {
                rank = static_cast<int>(r);
                break;
            }
        }
        if (rank < 0) continue;
        for (std::size_t i = 0; i < r_grid.size(); ++i)
            if (rank < r_grid[i]) curve.recall[i] += 1.0;
    }
    for (double& v : curve.recall) v /= static_cast<double>(truth.size());
    return curve;
}

double auc_recall(const RecallCurve& curve) {
    if (curve.r_grid.empty()) throw_arg("AUC needs a nonempty curve");
    if (curve.r_grid.size() == 1) return curve.recall.front();
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < curve.r_grid.size(); ++i) {
        const double x0 = std::log2(static_cast<double>(curve.r_grid[i]));
        const double x1 = std::log2(static_cast<double>(curve.r_grid[i + 1]));
        area += 0.5 * (x1 - x0) * (curve.recall[i] + curve.recall[i + 1]);
    }
    const double span = std::log2(static_cast<double>(curve.r_grid.back())) -
                        std::log2(static_cast<double>(curve.r_grid.front()));
    return area / span;
}

std::string eval_method_name(EvalMethod m) {
    switch (m) {
        case EvalMethod::lsq_nary: return "lsq-nary";
        case EvalMethod::lsq_binary: return "lsq-binary";
        case EvalMethod::itq: return "itq";
        case EvalMethod::pq: return "pq";
        case EvalMethod::ckmeans: return "ckmeans";
        case EvalMethod::okmeans: return "okmeans";
    }
    throw_arg("unknown eval method");
}

EvalMethod parse_eval_method(const std::string& name) {
    if (name == "lsq-nary") return EvalMethod::lsq_nary;
    if (name == "lsq-binary") return EvalMethod::lsq_binary;
    if (name == "itq") return EvalMethod::itq;
    if (name == "pq") return EvalMethod::pq;
    if (name == "ckmeans") return EvalMethod::ckmeans;
    if (name == "okmeans") return EvalMethod::okmeans;
    throw_data("unknown method '" + name + "'");
}

std::string strategy_name(Strategy s) {
    return s == Strategy::distance_estimation ? "distance-estimation"
                                              : "subset-indexing";
}

Strategy parse_strategy(const std::string& name) {
    if (name == "distance-estimation") return Strategy::distance_estimation;
    if (name == "subset-indexing") return Strategy::subset_indexing;
    throw_data("unknown strategy '" + name + "'");
}

namespace {

bool binary_method(EvalMethod m) {
    return m == EvalMethod::lsq_binary || m == EvalMethod::itq ||
           m == EvalMethod::okmeans;
}

std::vector<std::pair<std::string, std::string>> parse_kv(std::istream& in) {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    const auto trim = [](std::string s) {
        const auto from = s.find_first_not_of(" \t\r");
        if (from == std::string::npos) return std::string();
        const auto to = s.find_last_not_of(" \t\r");
        return s.substr(from, to - from + 1);
    };
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw_data("config line without '=': " + line);
        pairs.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return pairs;
}

long long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw_data("config key '" + key + "' needs an integer, got '" + value + "'");
    }
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw_data("config key '" + key + "' needs a number, got '" + value + "'");
    }
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
    std::vector<int> out;
    std::stringstream ss(value);
    std::string cell;
    while (std::getline(ss, cell, ','))
        out.push_back(static_cast<int>(parse_int(key, cell)));
    if (out.empty()) throw_data("config key '" + key + "' needs a list");
    return out;
}

void apply_key(ExperimentConfig& c, const std::string& key,
               const std::string& value) {
    if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "dim") c.dim = static_cast<int>(parse_int(key, value));
    else if (key == "train_count") c.train_count = static_cast<int>(parse_int(key, value));
    else if (key == "base_count") c.base_count = static_cast<int>(parse_int(key, value));
    else if (key == "query_count") c.query_count = static_cast<int>(parse_int(key, value));
    else if (key == "clusters") c.clusters = static_cast<int>(parse_int(key, value));
    else if (key == "spread") c.spread = parse_real(key, value);
    else if (key == "train_path") c.train_path = value;
    else if (key == "base_path") c.base_path = value;
    else if (key == "query_path") c.query_path = value;
    else if (key == "method") c.method = parse_eval_method(value);
    else if (key == "bits_per_dim") c.bits_per_dim = static_cast<int>(parse_int(key, value));
    else if (key == "bit_budget") c.bit_budget = static_cast<int>(parse_int(key, value));
    else if (key == "lambda") c.lambda = parse_real(key, value);
    else if (key == "iters") c.iters = static_cast<int>(parse_int(key, value));
    else if (key == "strategy") c.strategy = parse_strategy(value);
    else if (key == "k") c.k = static_cast<int>(parse_int(key, value));
    else if (key == "r_grid") c.r_grid = parse_int_list(key, value);
    else if (key == "emit_trace") c.emit_trace = parse_int(key, value) != 0;
    else throw_data("unknown config key '" + key + "'");
}

struct Splits {
    DataMatrix train;
    DataMatrix base;
    DataMatrix queries;
};

Splits make_splits(const ExperimentConfig& c) {
    if (!c.train_path.empty() || !c.base_path.empty() || !c.query_path.empty()) {
        if (c.train_path.empty() || c.base_path.empty() || c.query_path.empty())
            throw_data("train_path, base_path and query_path must be set together");
        return {load_matrix(c.train_path, MatrixFormat::raw_f32),
                load_matrix(c.base_path, MatrixFormat::raw_f32),
                load_matrix(c.query_path, MatrixFormat::raw_f32)};
    }
    if (c.train_count < 1 || c.base_count < 1 || c.query_count < 1)
        throw_arg("split sizes must be positive");
    const int total = c.train_count + c.base_count + c.query_count;
    const DataMatrix all =
        generate_synthetic(c.seed, c.dim, total, c.clusters, c.spread);
    const auto& v = all.values();
    return {DataMatrix(v.leftCols(c.train_count)),
            DataMatrix(v.middleCols(c.train_count, c.base_count)),
            DataMatrix(v.rightCols(c.query_count))};
}

// Budget arithmetic shared by the harness and the CLI: n-ary methods spend
// bits_per_dim on each of m = min(D, budget/bpd) dimensions; binary methods
// spend one bit per dimension, rounded down to whole index chunks under
// subset indexing.
struct BudgetPlan {
    int m = 0;  // code length (bits for binary methods)
    int n = 2;  // quantizer levels / clusters per subspace
};

BudgetPlan plan_budget(const ExperimentConfig& c, int dim) {
    if (c.bits_per_dim < 1 || c.bits_per_dim > 16)
        throw_arg("bits_per_dim must be in [1, 16]");
    if (c.bit_budget < 1) throw_arg("bit_budget must be positive");
    BudgetPlan plan;
    if (binary_method(c.method)) {
        int bits = std::min(dim, c.bit_budget);
        if (c.strategy == Strategy::subset_indexing) {
            bits -= bits % c.bits_per_dim;
            if (bits < c.bits_per_dim)
                throw_arg("bit budget below one index chunk");
        } else if (c.bits_per_dim != 1) {
            throw_arg("binary methods spend one bit per dimension; "
                      "bits_per_dim only selects the chunk size under "
                      "subset indexing");
        }
        plan.m = bits;
        plan.n = 2;
    } else {
        plan.m = std::min(dim, c.bit_budget / c.bits_per_dim);
        if (plan.m < 1) throw_arg("bit budget below one code dimension");
        plan.n = 1 << c.bits_per_dim;
    }
    return plan;
}

// One trained coding pipeline; owns whichever model the method needs.
struct Pipeline {
    EvalMethod method;
    BudgetPlan plan;
    std::optional<LsqModel> lsq;
    std::optional<ItqModel> itq;
    std::optional<SubspaceCodebooks> cb;

    NaryCodeSet encode(const DataMatrix& x) const {
        if (lsq) return lsq_encode(*lsq, x);
        if (cb) return sc_encode(*cb, x);
        const BinaryCodeSet bits = itq_encode(*itq, x);
        NaryCodeSet codes(bits.bits(), 2, bits.count());
        for (int j = 0; j < bits.count(); ++j)
            for (int i = 0; i < bits.bits(); ++i)
                codes.set(i, j, bits.bit(j, i) ? 2 : 1);
        return codes;
    }

    DataMatrix reconstruct(const NaryCodeSet& codes) const {
        if (lsq) return lsq_reconstruct(*lsq, codes);
        if (cb) return sc_reconstruct(*cb, codes);
        return itq_reconstruct(*itq, to_binary(codes));
    }

    LookupTables rank_tables() const {
        if (cb) return LookupTables::from_subspaces(*cb);
        // Subspace-reduction codes rank by Euclidean distance on the level
        // grid; for the sign quantizer that ordering is Hamming's.
        return LookupTables::from_grid(plan.m, plan.n);
    }

    std::vector<double> trace() const {
        if (lsq) return lsq->recon_history;
        if (itq) return itq->recon_history;
        return cb->objective_history;
    }
};

Pipeline train_pipeline(const ExperimentConfig& c, const DataMatrix& train) {
    Pipeline p;
    p.method = c.method;
    p.plan = plan_budget(c, static_cast<int>(train.dim()));
    switch (c.method) {
        case EvalMethod::lsq_nary:
        case EvalMethod::lsq_binary: {
            LsqOptions opts;
            opts.lambda = c.lambda;
            opts.max_iters = c.iters;
            p.lsq = train_lsq(train, p.plan.m, p.plan.n, opts);
            break;
        }
        case EvalMethod::itq:
            p.itq = train_itq(train, p.plan.m, c.iters, c.seed);
            break;
        case EvalMethod::pq:
            p.cb = train_pq(train, p.plan.m, p.plan.n, c.seed, c.iters);
            break;
        case EvalMethod::ckmeans:
        case EvalMethod::okmeans:
            p.cb = train_ckmeans(train, p.plan.m, p.plan.n, c.iters, c.seed);
            break;
    }
    return p;
}

std::vector<RankedList> retrieve_exhaustive(const Pipeline& p,
                                            const NaryCodeSet& base_codes,
                                            const NaryCodeSet& query_codes,
                                            int k) {
    std::vector<RankedList> out;
    out.reserve(query_codes.count());
    if (binary_method(p.method)) {
        const BinaryCodeSet base = to_binary(base_codes);
        const BinaryCodeSet queries = to_binary(query_codes);
        for (int q = 0; q < queries.count(); ++q)
            out.push_back(exhaustive_rank(base, queries.words(q), k));
    } else {
        const LookupTables tables = p.rank_tables();
        for (int q = 0; q < query_codes.count(); ++q)
            out.push_back(exhaustive_rank(tables, base_codes, query_codes.point(q), k));
    }
    return out;
}

std::vector<RankedList> retrieve_mih(const Pipeline& p,
                                     const NaryCodeSet& base_codes,
                                     const DataMatrix& queries,
                                     const NaryCodeSet& query_codes, int k,
                                     int chunk_bits) {
    std::vector<RankedList> out;
    out.reserve(query_codes.count());
    if (binary_method(p.method)) {
        const MultiIndexHash index =
            build_binary_index(to_binary(base_codes), chunk_bits);
        const BinaryCodeSet packed = to_binary(query_codes);
        for (int q = 0; q < packed.count(); ++q) {
            MultiIndexHash::BinaryQuery query;
            const auto words = packed.words(q);
            query.code.assign(words.begin(), words.end());
            const MihResult r = index.query(query, k);
            out.push_back({r.ids, r.distances});
        }
    } else {
        const MultiIndexHash index = build_nary_index(base_codes);
        const LookupTables tables = p.rank_tables();
        const UniformQuantizer quantizer(p.plan.n);
        for (int q = 0; q < query_codes.count(); ++q) {
            MultiIndexHash::NaryQuery query;
            const auto code = query_codes.point(q);
            query.code.assign(code.begin(), code.end());
            const Eigen::MatrixXd costs =
                p.lsq ? nary_costs_from_levels(
                            quantizer, p.lsq->w.transpose() * queries.point(q))
                      : nary_costs_from_codebooks(*p.cb, queries.point(q));
            query.costs = &costs;
            query.rank_tables = &tables;
            const MihResult r = index.query(query, k);
            out.push_back({r.ids, r.distances});
        }
    }
    return out;
}

} // namespace

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig config;
    for (const auto& [key, value] : parse_kv(in)) apply_key(config, key, value);
    return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_data("cannot open " + path);
    return parse_config(in);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    if (config.k < 1) throw_arg("k must be positive");
    const Splits raw = make_splits(config);
    if (raw.base.dim() != raw.train.dim() || raw.queries.dim() != raw.train.dim())
        throw_data("splits disagree on dimension");

    const PreprocessModel pre = fit_preprocess(raw.train, true);
    const DataMatrix train = apply_preprocess(pre, raw.train);
    const DataMatrix base = apply_preprocess(pre, raw.base);
    const DataMatrix queries = apply_preprocess(pre, raw.queries);

    const std::vector<NeighborList> truth = brute_force_knn(base, queries, 1);

    const Pipeline pipeline = train_pipeline(config, train);
    const NaryCodeSet base_codes = pipeline.encode(base);
    const NaryCodeSet query_codes = pipeline.encode(queries);

    std::vector<RankedList> retrieved;
    if (config.strategy == Strategy::distance_estimation) {
        const int k = std::min<int>(static_cast<int>(base.count()),
                                    std::max(config.r_grid.back(), 1));
        retrieved = retrieve_exhaustive(pipeline, base_codes, query_codes, k);
    } else {
        retrieved = retrieve_mih(pipeline, base_codes, queries, query_codes,
                                 config.k, config.bits_per_dim);
    }

    ExperimentResult result;
    result.config = config;
    result.code_length = pipeline.plan.m;
    result.effective_bits = binary_method(config.method)
                                ? pipeline.plan.m
                                : pipeline.plan.m * config.bits_per_dim;
    result.curve = recall_at_r(retrieved, truth, config.r_grid);
    result.auc = auc_recall(result.curve);
    const NaryCodeSet train_codes = pipeline.encode(train);
    result.train_error =
        quantization_error(train, pipeline.reconstruct(train_codes));
    if (config.emit_trace) result.trace = pipeline.trace();
    return result;
}

std::vector<double> convergence_trace(const ExperimentConfig& config) {
    if (config.method == EvalMethod::pq)
        throw_arg("pq trains each block independently; no global trace");
    const Splits raw = make_splits(config);
    const PreprocessModel pre = fit_preprocess(raw.train, true);
    const DataMatrix train = apply_preprocess(pre, raw.train);
    return train_pipeline(config, train).trace();
}

double embedding_classification(const DataMatrix& train_features,
                                const std::vector<int>& train_labels,
                                const DataMatrix& test_features,
                                const std::vector<int>& test_labels) {
    if (train_features.dim() != test_features.dim())
        throw_arg("feature dimensions disagree");
    if (train_labels.size() != static_cast<std::size_t>(train_features.count()) ||
        test_labels.size() != static_cast<std::size_t>(test_features.count()))
        throw_arg("label counts disagree with features");

    const std::vector<NeighborList> nn =
        brute_force_knn(train_features, test_features, 1);
    int correct = 0;
    for (std::size_t q = 0; q < nn.size(); ++q)
        if (train_labels[nn[q].ids.front()] == test_labels[q]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(nn.size());
}

std::string format_double(double v) { return detail::format_shortest(v); }

std::string format_report(const ExperimentResult& result) {
    const ExperimentConfig& c = result.config;
    std::ostringstream out;
    out << "report = naryq-eval\n";
    out << "method = " << eval_method_name(c.method) << '\n';
    out << "strategy = " << strategy_name(c.strategy) << '\n';
    out << "seed = " << c.seed << '\n';
    out << "dim = " << c.dim << '\n';
    out << "train_count = " << c.train_count << '\n';
    out << "base_count = " << c.base_count << '\n';
    out << "query_count = " << c.query_count << '\n';
    out << "clusters = " << c.clusters << '\n';
    out << "spread = " << format_double(c.spread) << '\n';
    out << "bits_per_dim = " << c.bits_per_dim << '\n';
    out << "bit_budget = " << c.bit_budget << '\n';
    out << "lambda = " << format_double(c.lambda) << '\n';
    out << "iters = " << c.iters << '\n';
    out << "k = " << c.k << '\n';
    out << "code_length = " << result.code_length << '\n';
    out << "effective_bits = " << result.effective_bits << '\n';
    out << "train_error = " << format_double(result.train_error) << '\n';
    out << "recall_definition = true 1-NN within top R\n";
    out << "auc_axis = log2(R), trapezoid, normalized by log2 span\n";
    out << "auc = " << format_double(result.auc) << '\n';
    out << "curve:\n";
    out << "R,recall\n";
    for (std::size_t i = 0; i < result.curve.r_grid.size(); ++i)
        out << result.curve.r_grid[i] << ','
            << format_double(result.curve.recall[i]) << '\n';
    if (c.emit_trace) {
        out << "trace:\n";
        out << "iteration,error\n";
        for (std::size_t i = 0; i < result.trace.size(); ++i)
            out << i << ',' << format_double(result.trace[i]) << '\n';
    }
    return out.str();
}

void write_report(const ExperimentResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_data("cannot write " + path);
    out << format_report(result);
    if (!out) throw_data("write failed for " + path);
}

BenchConfig parse_bench_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_data("cannot open " + path);
    BenchConfig config;
    for (const auto& [key, value] : parse_kv(in)) {
        if (key == "sweep_budgets") {
            config.budgets = parse_int_list(key, value);
        } else if (key == "sweep_bits_per_dim") {
            config.bits_per_dim = parse_int_list(key, value);
        } else if (key == "sweep_methods") {
            config.methods.clear();
            std::stringstream ss(value);
            std::string cell;
            while (std::getline(ss, cell, ',')) {
                const auto from = cell.find_first_not_of(" \t");
                const auto to = cell.find_last_not_of(" \t");
                if (from == std::string::npos) throw_data("empty method in list");
                config.methods.push_back(
                    parse_eval_method(cell.substr(from, to - from + 1)));
            }
            if (config.methods.empty()) throw_data("sweep_methods needs a list");
        } else {
            apply_key(config.base, key, value);
        }
    }
    return config;
}

std::string run_bench(const BenchConfig& config) {
    std::ostringstream out;
    out << "method,strategy,bit_budget,bits_per_dim,code_length,effective_bits,auc\n";
    for (const EvalMethod method : config.methods) {
        for (const int budget : config.budgets) {
            for (const int bpd : config.bits_per_dim) {
                // Binary methods under distance estimation always spend one
                // bit per dimension; higher bpd rows would repeat the first.
                if (binary_method(method) &&
                    config.base.strategy == Strategy::distance_estimation &&
                    bpd != 1)
                    continue;
                ExperimentConfig cell = config.base;
                cell.method = method;
                cell.bit_budget = budget;
                cell.bits_per_dim = bpd;
                ExperimentResult r;
                try {
                    r = run_experiment(cell);
                } catch (const Error& e) {
                    // Infeasible cell, e.g. budget below one index chunk.
                    if (e.code() == ErrorCode::invalid_argument) continue;
                    throw;
                }
                out << eval_method_name(method) << ','
                    << strategy_name(cell.strategy) << ',' << budget << ','
                    << bpd << ',' << r.code_length << ',' << r.effective_bits
                    << ',' << format_double(r.auc) << '\n';
            }
        }
    }
    return out.str();
}

} // namespace naryq
