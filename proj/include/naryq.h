/* naryq — vector coding and approximate nearest-neighbor retrieval.
 *
 * C interface to the shared library.  All functions return nq_status;
 * outputs come back through pointers.  Handles are opaque and must be
 * released with the matching nq_*_free.  On failure the thread-local
 * message from nq_last_error() describes what went wrong.
 */
#ifndef NARYQ_H
#define NARYQ_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nq_status {
  NQ_OK = 0,
  NQ_ERR_ARG = 1,     /* invalid argument / unusable input */
  NQ_ERR_DATA = 2,    /* bad file, malformed container, IO failure */
  NQ_ERR_NUMERIC = 3, /* training or solve failure */
} nq_status;

const char* nq_last_error(void);

/* ---- matrices (column-major double, D x N) ---- */

typedef struct nq_matrix nq_matrix;

nq_status nq_matrix_create(int dim, int count, const double* colmajor,
                           nq_matrix** out);
nq_status nq_matrix_load(const char* path, nq_matrix** out);
nq_status nq_matrix_save(const nq_matrix* m, const char* path);
nq_status nq_matrix_dim(const nq_matrix* m, int* out);
nq_status nq_matrix_count(const nq_matrix* m, int* out);
nq_status nq_matrix_data(const nq_matrix* m, const double** out);
void nq_matrix_free(nq_matrix* m);

/* Synthetic clustered Gaussian data, deterministic in the seed. */
nq_status nq_generate(uint64_t seed, int dim, int count, int clusters,
                      double spread, nq_matrix** out);

/* ---- training ---- */

typedef struct nq_model nq_model;

typedef struct nq_train_params {
  const char* method;  /* "lsq" | "itq" | "pq" | "ckmeans" */
  int bits_per_dim;    /* log2 of levels per code dimension */
  int code_length;     /* m; dimensions of the code */
  double lambda;       /* lsq ridge weight */
  int iters;           /* trainer iteration cap */
  uint64_t seed;
} nq_train_params;

nq_status nq_train(const nq_matrix* data, const nq_train_params* params,
                   nq_model** out);
nq_status nq_model_save(const nq_model* m, const char* path);
nq_status nq_model_load(const char* path, nq_model** out);
nq_status nq_model_code_length(const nq_model* m, int* out);
nq_status nq_model_arity(const nq_model* m, int* out);
nq_status nq_model_method(const nq_model* m, const char** out);
void nq_model_free(nq_model* m);

/* ---- codes ---- */

typedef struct nq_codes nq_codes;

nq_status nq_encode(const nq_model* model, const nq_matrix* data,
                    nq_codes** out);
nq_status nq_codes_save(const nq_codes* c, const char* path);
nq_status nq_codes_load(const char* path, nq_codes** out);
nq_status nq_codes_length(const nq_codes* c, int* out);
nq_status nq_codes_arity(const nq_codes* c, int* out);
nq_status nq_codes_count(const nq_codes* c, int* out);
nq_status nq_codes_at(const nq_codes* c, int dim, int point, int* out);
void nq_codes_free(nq_codes* c);

/* ---- retrieval results ---- */

typedef struct nq_result nq_result;

nq_status nq_result_queries(const nq_result* r, int* out);
nq_status nq_result_k(const nq_result* r, int* out);
nq_status nq_result_id(const nq_result* r, int query, int rank, int* out);
nq_status nq_result_distance(const nq_result* r, int query, int rank,
                             double* out);
/* CSV rows query_id,rank,base_id,distance with deterministic formatting. */
nq_status nq_result_save(const nq_result* r, const char* path);
void nq_result_free(nq_result* r);

/* Exhaustive scan: estimate distances from codes alone and rank every base
 * point for each query. */
nq_status nq_scan(const nq_model* model, const nq_codes* base,
                  const nq_matrix* queries, int k, nq_result** out);

/* Exact squared-Euclidean k-NN on raw vectors (ground truth). */
nq_status nq_ground_truth(const nq_matrix* base, const nq_matrix* queries,
                          int k, nq_result** out);

/* ---- multi-index hashing ---- */

typedef struct nq_index nq_index;

/* kind "nary": one table per code dimension.  kind "binary": b-bit chunk
 * tables over the packed binary expansion (requires arity 2 codes). */
nq_status nq_index_build(const nq_codes* base, const char* kind, int b,
                         nq_index** out);
nq_status nq_index_save(const nq_index* idx, const char* path);
nq_status nq_index_load(const char* path, nq_index** out);
nq_status nq_index_tables(const nq_index* idx, int* out);
nq_status nq_index_query(const nq_index* idx, const nq_model* model,
                         const nq_matrix* queries, int k, nq_result** out);
void nq_index_free(nq_index* idx);

/* ---- evaluation harness ---- */

/* Run one experiment (or a bench sweep) from a key = value config file and
 * write the deterministic report to out_path. */
nq_status nq_eval_run(const char* config_path, const char* out_path);
nq_status nq_bench_run(const char* config_path, const char* out_path);

#ifdef __cplusplus
}
#endif

#endif /* NARYQ_H */
