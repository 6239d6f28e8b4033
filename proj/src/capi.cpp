#include "naryq.h"

#include <algorithm>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "naryq/dataset.hpp"
#include "naryq/detail/text.hpp"
#include "naryq/distance.hpp"
#include "naryq/error.hpp"
#include "naryq/eval.hpp"
#include "naryq/mih.hpp"
#include "naryq/model_io.hpp"

using namespace naryq;

struct nq_matrix {
    DataMatrix m;
};

struct nq_model {
    TrainedModel m;
};

struct nq_codes {
    NaryCodeSet c;
};

struct nq_result {
    std::vector<RankedList> lists;
    std::vector<std::vector<int>> scores;  // per query, empty unless MIH
    int k = 0;
};

struct nq_index {
    MultiIndexHash idx;
};

namespace {

thread_local std::string g_last_error;

nq_status status_of(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return NQ_ERR_ARG;
        case ErrorCode::data: return NQ_ERR_DATA;
        case ErrorCode::numeric: return NQ_ERR_NUMERIC;
    }
    return NQ_ERR_ARG;
}

template <typename Fn>
nq_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return NQ_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return NQ_ERR_NUMERIC;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return NQ_ERR_DATA;
    }
}

void require(bool ok, const char* message) {
    if (!ok) throw_arg(message);
}

MatrixFormat format_for(const std::string& path) {
    return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0
               ? MatrixFormat::csv
               : MatrixFormat::raw_f32;
}

// Model-specific ranking currency for exhaustive scans and MIH tie-breaks.
LookupTables model_tables(const TrainedModel& model) {
    switch (model.method) {
        case Method::lsq: {
            const auto& lsq = std::get<LsqModel>(model.model);
            return LookupTables::from_grid(lsq.m, lsq.n);
        }
        case Method::itq: {
            const auto& itq = std::get<ItqModel>(model.model);
            return LookupTables::from_grid(
                static_cast<int>(itq.projection.cols()), 2);
        }
        case Method::pq:
        case Method::ckmeans:
            return LookupTables::from_subspaces(
                std::get<SubspaceCodebooks>(model.model));
    }
    throw_arg("unknown method");
}

Eigen::MatrixXd model_costs(const TrainedModel& model,
                            const Eigen::VectorXd& preprocessed) {
    switch (model.method) {
        case Method::lsq: {
            const auto& lsq = std::get<LsqModel>(model.model);
            return nary_costs_from_levels(UniformQuantizer(lsq.n),
                                          lsq.w.transpose() * preprocessed);
        }
        case Method::itq: {
            const auto& itq = std::get<ItqModel>(model.model);
            const Eigen::VectorXd y =
                itq.rotation.transpose() * itq.projection.transpose() * preprocessed;
            return nary_costs_from_levels(UniformQuantizer(2), y);
        }
        case Method::pq:
        case Method::ckmeans:
            return nary_costs_from_codebooks(
                std::get<SubspaceCodebooks>(model.model), preprocessed);
    }
    throw_arg("unknown method");
}

nq_result* result_from(std::vector<RankedList> lists, int k) {
    auto* r = new nq_result;
    r->lists = std::move(lists);
    r->k = k;
    return r;
}

} // namespace

extern "C" {

const char* nq_last_error(void) { return g_last_error.c_str(); }

/* ---- matrices ---- */

nq_status nq_matrix_create(int dim, int count, const double* colmajor,
                           nq_matrix** out) {
    return guarded([&] {
        require(colmajor && out, "null pointer");
        require(dim >= 1 && count >= 1, "dim and count must be positive");
        Eigen::MatrixXd values =
            Eigen::Map<const Eigen::MatrixXd>(colmajor, dim, count);
        *out = new nq_matrix{DataMatrix(std::move(values))};
    });
}

nq_status nq_matrix_load(const char* path, nq_matrix** out) {
    return guarded([&] {
        require(path && out, "null pointer");
        *out = new nq_matrix{load_matrix(path, format_for(path))};
    });
}

nq_status nq_matrix_save(const nq_matrix* m, const char* path) {
    return guarded([&] {
        require(m && path, "null pointer");
        save_matrix(m->m, path, format_for(path));
    });
}

nq_status nq_matrix_dim(const nq_matrix* m, int* out) {
    return guarded([&] {
        require(m && out, "null pointer");
        *out = static_cast<int>(m->m.dim());
    });
}

nq_status nq_matrix_count(const nq_matrix* m, int* out) {
    return guarded([&] {
        require(m && out, "null pointer");
        *out = static_cast<int>(m->m.count());
    });
}

nq_status nq_matrix_data(const nq_matrix* m, const double** out) {
    return guarded([&] {
        require(m && out, "null pointer");
        *out = m->m.values().data();
    });
}

void nq_matrix_free(nq_matrix* m) { delete m; }

nq_status nq_generate(uint64_t seed, int dim, int count, int clusters,
                      double spread, nq_matrix** out) {
    return guarded([&] {
        require(out, "null pointer");
        *out = new nq_matrix{generate_synthetic(seed, dim, count, clusters, spread)};
    });
}

/* ---- training ---- */

nq_status nq_train(const nq_matrix* data, const nq_train_params* params,
                   nq_model** out) {
    return guarded([&] {
        require(data && params && params->method && out, "null pointer");
        const Method method = parse_method(params->method);
        const int m = params->code_length;
        require(m >= 1, "code_length must be positive");
        require(params->iters >= 1, "iters must be positive");
        require(params->bits_per_dim >= 1 && params->bits_per_dim <= 16,
                "bits_per_dim must be in [1, 16]");
        const int n = 1 << params->bits_per_dim;

        TrainedModel model;
        model.method = method;
        model.preprocess = fit_preprocess(data->m, true);
        const DataMatrix pp = apply_preprocess(model.preprocess, data->m);
        switch (method) {
            case Method::lsq: {
                LsqOptions opts;
                opts.lambda = params->lambda;
                opts.max_iters = params->iters;
                model.model = train_lsq(pp, m, n, opts);
                break;
            }
            case Method::itq:
                require(params->bits_per_dim == 1,
                        "itq is binary; bits_per_dim must be 1");
                model.model = train_itq(pp, m, params->iters, params->seed);
                break;
            case Method::pq:
                model.model = train_pq(pp, m, n, params->seed, params->iters);
                break;
            case Method::ckmeans:
                model.model = train_ckmeans(pp, m, n, params->iters, params->seed);
                break;
        }
        *out = new nq_model{std::move(model)};
    });
}

nq_status nq_model_save(const nq_model* m, const char* path) {
    return guarded([&] {
        require(m && path, "null pointer");
        save_model(m->m, path);
    });
}

nq_status nq_model_load(const char* path, nq_model** out) {
    return guarded([&] {
        require(path && out, "null pointer");
        *out = new nq_model{load_model(path)};
    });
}

nq_status nq_model_code_length(const nq_model* m, int* out) {
    return guarded([&] {
        require(m && out, "null pointer");
        *out = m->m.code_length();
    });
}

nq_status nq_model_arity(const nq_model* m, int* out) {
    return guarded([&] {
        require(m && out, "null pointer");
        *out = m->m.arity();
    });
}

nq_status nq_model_method(const nq_model* m, const char** out) {
    return guarded([&] {
        require(m && out, "null pointer");
        switch (m->m.method) {
            case Method::lsq: *out = "lsq"; return;
            case Method::itq: *out = "itq"; return;
            case Method::pq: *out = "pq"; return;
            case Method::ckmeans: *out = "ckmeans"; return;
        }
        throw_arg("unknown method");
    });
}

void nq_model_free(nq_model* m) { delete m; }

/* ---- codes ---- */

nq_status nq_encode(const nq_model* model, const nq_matrix* data,
                    nq_codes** out) {
    return guarded([&] {
        require(model && data && out, "null pointer");
        *out = new nq_codes{encode_points(model->m, data->m)};
    });
}

nq_status nq_codes_save(const nq_codes* c, const char* path) {
    return guarded([&] {
        require(c && path, "null pointer");
        save_codes(c->c, path);
    });
}

nq_status nq_codes_load(const char* path, nq_codes** out) {
    return guarded([&] {
        require(path && out, "null pointer");
        *out = new nq_codes{load_codes(path)};
    });
}

nq_status nq_codes_length(const nq_codes* c, int* out) {
    return guarded([&] {
        require(c && out, "null pointer");
        *out = c->c.length();
    });
}

nq_status nq_codes_arity(const nq_codes* c, int* out) {
    return guarded([&] {
        require(c && out, "null pointer");
        *out = c->c.arity();
    });
}

nq_status nq_codes_count(const nq_codes* c, int* out) {
    return guarded([&] {
        require(c && out, "null pointer");
        *out = c->c.count();
    });
}

nq_status nq_codes_at(const nq_codes* c, int dim, int point, int* out) {
    return guarded([&] {
        require(c && out, "null pointer");
        require(dim >= 0 && dim < c->c.length(), "dim out of range");
        require(point >= 0 && point < c->c.count(), "point out of range");
        *out = c->c.at(dim, point);
    });
}

void nq_codes_free(nq_codes* c) { delete c; }

/* ---- retrieval results ---- */

nq_status nq_result_queries(const nq_result* r, int* out) {
    return guarded([&] {
        require(r && out, "null pointer");
        *out = static_cast<int>(r->lists.size());
    });
}

nq_status nq_result_k(const nq_result* r, int* out) {
    return guarded([&] {
        require(r && out, "null pointer");
        *out = r->k;
    });
}

nq_status nq_result_id(const nq_result* r, int query, int rank, int* out) {
    return guarded([&] {
        require(r && out, "null pointer");
        require(query >= 0 && query < static_cast<int>(r->lists.size()),
                "query out of range");
        const auto& ids = r->lists[query].ids;
        require(rank >= 0 && rank < static_cast<int>(ids.size()),
                "rank out of range");
        *out = ids[rank];
    });
}

nq_status nq_result_distance(const nq_result* r, int query, int rank,
                             double* out) {
    return guarded([&] {
        require(r && out, "null pointer");
        require(query >= 0 && query < static_cast<int>(r->lists.size()),
                "query out of range");
        const auto& distances = r->lists[query].distances;
        require(rank >= 0 && rank < static_cast<int>(distances.size()),
                "rank out of range");
        *out = distances[rank];
    });
}

nq_status nq_result_save(const nq_result* r, const char* path) {
    return guarded([&] {
        require(r && path, "null pointer");
        std::ofstream out(path, std::ios::binary);
        if (!out) throw_data(std::string("cannot write ") + path);
        const bool with_scores = !r->scores.empty();
        out << (with_scores ? "query_id,rank,base_id,distance,score\n"
                            : "query_id,rank,base_id,distance\n");
        for (std::size_t q = 0; q < r->lists.size(); ++q) {
            const auto& list = r->lists[q];
            for (std::size_t i = 0; i < list.ids.size(); ++i) {
                out << q << ',' << i << ',' << list.ids[i] << ','
                    << detail::format_shortest(list.distances[i]);
                if (with_scores) out << ',' << r->scores[q][i];
                out << '\n';
            }
        }
        if (!out) throw_data(std::string("write failed for ") + path);
    });
}

void nq_result_free(nq_result* r) { delete r; }

nq_status nq_scan(const nq_model* model, const nq_codes* base,
                  const nq_matrix* queries, int k, nq_result** out) {
    return guarded([&] {
        require(model && base && queries && out, "null pointer");
        require(k >= 1, "k must be positive");
        require(base->c.length() == model->m.code_length() &&
                    base->c.arity() == model->m.arity(),
                "codes do not match the model");
        const NaryCodeSet query_codes = encode_points(model->m, queries->m);
        const int top = std::min(k, base->c.count());

        std::vector<RankedList> lists;
        lists.reserve(query_codes.count());
        if (model->m.method == Method::itq) {
            const BinaryCodeSet packed = to_binary(base->c);
            const BinaryCodeSet packed_queries = to_binary(query_codes);
            for (int q = 0; q < packed_queries.count(); ++q)
                lists.push_back(
                    exhaustive_rank(packed, packed_queries.words(q), top));
        } else {
            const LookupTables tables = model_tables(model->m);
            for (int q = 0; q < query_codes.count(); ++q)
                lists.push_back(
                    exhaustive_rank(tables, base->c, query_codes.point(q), top));
        }
        *out = result_from(std::move(lists), k);
    });
}

nq_status nq_ground_truth(const nq_matrix* base, const nq_matrix* queries,
                          int k, nq_result** out) {
    return guarded([&] {
        require(base && queries && out, "null pointer");
        require(k >= 1, "k must be positive");
        const auto truth = brute_force_knn(base->m, queries->m, k);
        std::vector<RankedList> lists;
        lists.reserve(truth.size());
        for (const auto& t : truth) {
            RankedList list;
            list.ids.assign(t.ids.begin(), t.ids.end());
            list.distances = t.distances;
            lists.push_back(std::move(list));
        }
        *out = result_from(std::move(lists), k);
    });
}

/* ---- multi-index hashing ---- */

nq_status nq_index_build(const nq_codes* base, const char* kind, int b,
                         nq_index** out) {
    return guarded([&] {
        require(base && kind && out, "null pointer");
        const std::string which = kind;
        if (which == "nary") {
            *out = new nq_index{build_nary_index(base->c)};
        } else if (which == "binary") {
            require(base->c.arity() == 2, "binary indexing needs arity-2 codes");
            *out = new nq_index{build_binary_index(to_binary(base->c), b)};
        } else {
            throw_arg("kind must be 'nary' or 'binary'");
        }
    });
}

nq_status nq_index_save(const nq_index* idx, const char* path) {
    return guarded([&] {
        require(idx && path, "null pointer");
        save_index(idx->idx, path);
    });
}

nq_status nq_index_load(const char* path, nq_index** out) {
    return guarded([&] {
        require(path && out, "null pointer");
        *out = new nq_index{load_index(path)};
    });
}

nq_status nq_index_tables(const nq_index* idx, int* out) {
    return guarded([&] {
        require(idx && out, "null pointer");
        *out = idx->idx.tables();
    });
}

nq_status nq_index_query(const nq_index* idx, const nq_model* model,
                         const nq_matrix* queries, int k, nq_result** out) {
    return guarded([&] {
        require(idx && model && queries && out, "null pointer");
        require(k >= 1, "k must be positive");
        const NaryCodeSet query_codes = encode_points(model->m, queries->m);
        const DataMatrix pp =
            apply_preprocess(model->m.preprocess, queries->m);

        auto* result = new nq_result;
        result->k = k;
        try {
            if (idx->idx.kind() == MultiIndexHash::Kind::nary) {
                require(query_codes.length() == idx->idx.code_length(),
                        "model code length does not match the index");
                const LookupTables tables = model_tables(model->m);
                for (int q = 0; q < query_codes.count(); ++q) {
                    MultiIndexHash::NaryQuery query;
                    const auto code = query_codes.point(q);
                    query.code.assign(code.begin(), code.end());
                    const Eigen::MatrixXd costs =
                        model_costs(model->m, pp.point(q));
                    query.costs = &costs;
                    query.rank_tables = &tables;
                    const MihResult r = idx->idx.query(query, k);
                    result->lists.push_back({r.ids, r.distances});
                    result->scores.push_back(r.scores);
                }
            } else {
                require(query_codes.arity() == 2,
                        "binary index needs an arity-2 (binary) model");
                require(query_codes.length() == idx->idx.code_length(),
                        "model code length does not match the index");
                const BinaryCodeSet packed = to_binary(query_codes);
                for (int q = 0; q < packed.count(); ++q) {
                    MultiIndexHash::BinaryQuery query;
                    const auto words = packed.words(q);
                    query.code.assign(words.begin(), words.end());
                    const MihResult r = idx->idx.query(query, k);
                    result->lists.push_back({r.ids, r.distances});
                    result->scores.push_back(r.scores);
                }
            }
        } catch (...) {
            delete result;
            throw;
        }
        *out = result;
    });
}

void nq_index_free(nq_index* idx) { delete idx; }

/* ---- evaluation harness ---- */

nq_status nq_eval_run(const char* config_path, const char* out_path) {
    return guarded([&] {
        require(config_path && out_path, "null pointer");
        const ExperimentConfig config = parse_config_file(config_path);
        write_report(run_experiment(config), out_path);
    });
}

nq_status nq_bench_run(const char* config_path, const char* out_path) {
    return guarded([&] {
        require(config_path && out_path, "null pointer");
        const BenchConfig config = parse_bench_config_file(config_path);
        const std::string csv = run_bench(config);
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw_data(std::string("cannot write ") + out_path);
        out << csv;
        if (!out) throw_data(std::string("write failed for ") + out_path);
    });
}

} /* extern "C" */
