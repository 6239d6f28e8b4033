// naryq command-line front end.  Talks to the library exclusively through
// the C interface in naryq.h; exit codes mirror nq_status (0 ok, 1 usage,
// 2 data, 3 numeric).
#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "naryq.h"

namespace {

template <auto F>
struct fn_deleter {
    template <typename T>
    void operator()(T* p) const { F(p); }
};

using matrix_ptr = std::unique_ptr<nq_matrix, fn_deleter<nq_matrix_free>>;
using model_ptr = std::unique_ptr<nq_model, fn_deleter<nq_model_free>>;
using codes_ptr = std::unique_ptr<nq_codes, fn_deleter<nq_codes_free>>;
using result_ptr = std::unique_ptr<nq_result, fn_deleter<nq_result_free>>;
using index_ptr = std::unique_ptr<nq_index, fn_deleter<nq_index_free>>;

int report(nq_status status) {
    std::fprintf(stderr, "naryq: %s\n", nq_last_error());
    return static_cast<int>(status);
}

#define CHECK(call)                                  \
    do {                                             \
        const nq_status check_status_ = (call);      \
        if (check_status_ != NQ_OK) return report(check_status_); \
    } while (0)

struct GenOpts {
    std::uint64_t seed = 1;
    int dim = 32;
    int count = 10000;
    int clusters = 50;
    double spread = 0.2;
    std::string out;
};

int run_gen(const GenOpts& o) {
    nq_matrix* raw = nullptr;
    CHECK(nq_generate(o.seed, o.dim, o.count, o.clusters, o.spread, &raw));
    const matrix_ptr data(raw);
    CHECK(nq_matrix_save(data.get(), o.out.c_str()));
    std::printf("wrote %s (%d x %d)\n", o.out.c_str(), o.dim, o.count);
    return 0;
}

struct TrainOpts {
    std::string method;
    int bits = 64;
    int bits_per_dim = 2;
    double lambda = 1.0;
    int iters = 50;
    std::uint64_t seed = 1;
    std::string data;
    std::string model_out;
};

int run_train(const TrainOpts& o) {
    nq_matrix* raw = nullptr;
    CHECK(nq_matrix_load(o.data.c_str(), &raw));
    const matrix_ptr data(raw);

    int dim = 0;
    CHECK(nq_matrix_dim(data.get(), &dim));
    const int bpd = o.method == "itq" ? 1 : o.bits_per_dim;
    if (bpd < 1 || o.bits < bpd) {
        std::fprintf(stderr, "naryq: --bits %d is below one code dimension "
                             "at --bits-per-dim %d\n", o.bits, bpd);
        return 1;
    }
    const int m = std::min(dim, o.bits / bpd);

    nq_train_params params;
    params.method = o.method.c_str();
    params.bits_per_dim = bpd;
    params.code_length = m;
    params.lambda = o.lambda;
    params.iters = o.iters;
    params.seed = o.seed;

    nq_model* trained = nullptr;
    CHECK(nq_train(data.get(), &params, &trained));
    const model_ptr model(trained);
    CHECK(nq_model_save(model.get(), o.model_out.c_str()));

    int arity = 0;
    CHECK(nq_model_arity(model.get(), &arity));
    std::printf("trained %s: m=%d levels=%d (%d bits) -> %s\n",
                o.method.c_str(), m, arity, m * bpd, o.model_out.c_str());
    return 0;
}

struct EncodeOpts {
    std::string model;
    std::string data;
    std::string codes_out;
};

int run_encode(const EncodeOpts& o) {
    nq_model* raw_model = nullptr;
    CHECK(nq_model_load(o.model.c_str(), &raw_model));
    const model_ptr model(raw_model);

    nq_matrix* raw_data = nullptr;
    CHECK(nq_matrix_load(o.data.c_str(), &raw_data));
    const matrix_ptr data(raw_data);

    nq_codes* raw_codes = nullptr;
    CHECK(nq_encode(model.get(), data.get(), &raw_codes));
    const codes_ptr codes(raw_codes);
    CHECK(nq_codes_save(codes.get(), o.codes_out.c_str()));

    int count = 0;
    CHECK(nq_codes_count(codes.get(), &count));
    std::printf("encoded %d points -> %s\n", count, o.codes_out.c_str());
    return 0;
}

struct IndexOpts {
    std::string codes;
    std::string kind = "nary";
    int b = 8;
    std::string index_out;
};

int run_index(const IndexOpts& o) {
    nq_codes* raw_codes = nullptr;
    CHECK(nq_codes_load(o.codes.c_str(), &raw_codes));
    const codes_ptr codes(raw_codes);

    nq_index* raw_index = nullptr;
    CHECK(nq_index_build(codes.get(), o.kind.c_str(), o.b, &raw_index));
    const index_ptr index(raw_index);
    CHECK(nq_index_save(index.get(), o.index_out.c_str()));

    int tables = 0;
    CHECK(nq_index_tables(index.get(), &tables));
    std::printf("built %s index, %d tables -> %s\n", o.kind.c_str(), tables,
                o.index_out.c_str());
    return 0;
}

struct QueryOpts {
    std::string index;
    std::string model;
    std::string queries;
    int k = 100;
    std::string out;
};

int run_query(const QueryOpts& o) {
    nq_index* raw_index = nullptr;
    CHECK(nq_index_load(o.index.c_str(), &raw_index));
    const index_ptr index(raw_index);

    nq_model* raw_model = nullptr;
    CHECK(nq_model_load(o.model.c_str(), &raw_model));
    const model_ptr model(raw_model);

    nq_matrix* raw_queries = nullptr;
    CHECK(nq_matrix_load(o.queries.c_str(), &raw_queries));
    const matrix_ptr queries(raw_queries);

    nq_result* raw_result = nullptr;
    CHECK(nq_index_query(index.get(), model.get(), queries.get(), o.k,
                         &raw_result));
    const result_ptr result(raw_result);
    CHECK(nq_result_save(result.get(), o.out.c_str()));

    int n_queries = 0;
    CHECK(nq_result_queries(result.get(), &n_queries));
    std::printf("ranked %d queries (k=%d) -> %s\n", n_queries, o.k,
                o.out.c_str());
    return 0;
}

int run_eval(const std::string& config, const std::string& out) {
    CHECK(nq_eval_run(config.c_str(), out.c_str()));
    std::printf("report -> %s\n", out.c_str());
    return 0;
}

int run_bench(const std::string& config, const std::string& out) {
    CHECK(nq_bench_run(config.c_str(), out.c_str()));
    std::printf("bench -> %s\n", out.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"vector coding and approximate nearest-neighbor retrieval"};
    app.require_subcommand(1);

    GenOpts gen;
    auto* gen_cmd = app.add_subcommand("gen", "generate synthetic clustered data");
    gen_cmd->add_option("--seed", gen.seed);
    gen_cmd->add_option("--dim", gen.dim);
    gen_cmd->add_option("--count", gen.count);
    gen_cmd->add_option("--clusters", gen.clusters);
    gen_cmd->add_option("--spread", gen.spread);
    gen_cmd->add_option("--out", gen.out)->required();

    TrainOpts train;
    auto* train_cmd = app.add_subcommand("train", "train a coding model");
    train_cmd->add_option("--method", train.method)
        ->required()
        ->check(CLI::IsMember({"lsq", "itq", "pq", "ckmeans"}));
    train_cmd->add_option("--bits", train.bits, "total bit budget per point");
    train_cmd->add_option("--bits-per-dim", train.bits_per_dim,
                          "log2 of levels per code dimension");
    train_cmd->add_option("--lambda", train.lambda);
    train_cmd->add_option("--iters", train.iters);
    train_cmd->add_option("--seed", train.seed);
    train_cmd->add_option("--data", train.data)->required();
    train_cmd->add_option("--model-out", train.model_out)->required();

    EncodeOpts encode;
    auto* encode_cmd = app.add_subcommand("encode", "encode points with a model");
    encode_cmd->add_option("--model", encode.model)->required();
    encode_cmd->add_option("--data", encode.data)->required();
    encode_cmd->add_option("--codes-out", encode.codes_out)->required();

    IndexOpts index;
    auto* index_cmd = app.add_subcommand("index", "build a multi-index hash");
    index_cmd->add_option("--codes", index.codes)->required();
    index_cmd->add_option("--kind", index.kind)
        ->check(CLI::IsMember({"nary", "binary"}));
    index_cmd->add_option("--b", index.b, "chunk bits for binary indexes");
    index_cmd->add_option("--index-out", index.index_out)->required();

    QueryOpts query;
    auto* query_cmd = app.add_subcommand("query", "probe an index");
    query_cmd->add_option("--index", query.index)->required();
    query_cmd->add_option("--model", query.model)->required();
    query_cmd->add_option("--queries", query.queries)->required();
    query_cmd->add_option("--k", query.k);
    query_cmd->add_option("--out", query.out)->required();

    std::string eval_config, eval_out;
    auto* eval_cmd = app.add_subcommand("eval", "run one benchmark experiment");
    eval_cmd->add_option("--config", eval_config)->required();
    eval_cmd->add_option("--out", eval_out)->required();

    std::string bench_config, bench_out;
    auto* bench_cmd = app.add_subcommand("bench", "sweep budgets x bits-per-dim");
    bench_cmd->add_option("--config", bench_config)->required();
    bench_cmd->add_option("--out", bench_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    if (gen_cmd->parsed()) return run_gen(gen);
    if (train_cmd->parsed()) return run_train(train);
    if (encode_cmd->parsed()) return run_encode(encode);
    if (index_cmd->parsed()) return run_index(index);
    if (query_cmd->parsed()) return run_query(query);
    if (eval_cmd->parsed()) return run_eval(eval_config, eval_out);
    if (bench_cmd->parsed()) return run_bench(bench_config, bench_out);
    return 1;
}
