/*
 * C interface to the misc library: multiple independent subspace clusterings.
 *
 * All objects are opaque handles created and destroyed through this API.
 * Functions return MISC_OK on success; on failure they return an error code
 * and leave a human-readable message retrievable via misc_last_error() (the
 * message is thread-local and valid until the next failing call on the same
 * thread). Output parameters are untouched on failure.
 */
#ifndef MISC_H
#define MISC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MISC_API __declspec(dllexport)
#else
#define MISC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum misc_status {
    MISC_OK = 0,
    MISC_ERR_INVALID_ARGUMENT = 1,
    MISC_ERR_PARSE = 2,
    MISC_ERR_NUMERIC = 3,
    MISC_ERR_IO = 4,
    MISC_ERR_UNKNOWN = 5
} misc_status;

typedef struct misc_matrix misc_matrix;   /* d x n data matrix, features by samples */
typedef struct misc_dataset misc_dataset; /* matrix plus named ground-truth label views */
typedef struct misc_config misc_config;   /* pipeline configuration */
typedef struct misc_report misc_report;   /* pipeline run report */
typedef struct misc_ablation misc_ablation; /* single-variant factorization result */

MISC_API const char* misc_version(void);

/* Last error message of the calling thread; empty string if none. */
MISC_API const char* misc_last_error(void);

/* Frees strings returned through char** out-parameters. */
MISC_API void misc_string_free(char* s);

/* ---- matrix ---------------------------------------------------------- */

/* `values` is column-major: values[i + j*d] is feature i of sample j. */
MISC_API misc_status misc_matrix_create(size_t d, size_t n, const double* values,
                                        misc_matrix** out);

/* CSV with optional single header row; samples_as_rows != 0 transposes. */
MISC_API misc_status misc_matrix_from_csv(const char* path, int samples_as_rows,
                                          misc_matrix** out);

MISC_API size_t misc_matrix_num_features(const misc_matrix* m);
MISC_API size_t misc_matrix_num_samples(const misc_matrix* m);

/* Copies column-major values into `buffer` (length d*n). */
MISC_API misc_status misc_matrix_copy_values(const misc_matrix* m, double* buffer, size_t len);

MISC_API void misc_matrix_free(misc_matrix* m);

/* ---- datasets and generators ----------------------------------------- */

/* kind: "gaussian_blobs", "atom", "lsun" or "rings". `params_json` is an
 * optional JSON object of generator parameters (NULL for defaults). */
MISC_API misc_status misc_dataset_generate(const char* kind, size_t n, uint64_t seed,
                                           const char* params_json, misc_dataset** out);

/* Stacks the parts' feature blocks with an independent seeded sample
 * permutation per part; views follow their part's permutation. */
MISC_API misc_status misc_dataset_compose(const misc_dataset* const* parts, size_t num_parts,
                                          uint64_t seed, misc_dataset** out);

/* Borrowed pointer, valid while the dataset lives. */
MISC_API const misc_matrix* misc_dataset_matrix(const misc_dataset* ds);

MISC_API size_t misc_dataset_num_views(const misc_dataset* ds);
MISC_API const char* misc_dataset_view_name(const misc_dataset* ds, size_t view);
MISC_API misc_status misc_dataset_view_labels(const misc_dataset* ds, size_t view,
                                              uint32_t* buffer, size_t len);
MISC_API void misc_dataset_free(misc_dataset* ds);

/* ---- configuration ---------------------------------------------------- */

MISC_API misc_config* misc_config_create(void);

/* Flat key=value vocabulary shared with the config file, e.g.
 * ("lambda", "10"), ("eps_neighbors", "5"), ("kernel", "gaussian"),
 * ("seed", "7"), ("v_override", "2"), ("k_override", "4,2"). */
MISC_API misc_status misc_config_set(misc_config* cfg, const char* key, const char* value);

MISC_API misc_status misc_config_load_file(misc_config* cfg, const char* path);
MISC_API void misc_config_free(misc_config* cfg);

/* ---- pipeline ---------------------------------------------------------- */

/* Runs the full pipeline on `X`. `views` may be NULL; when given it must be
 * `num_views` label vectors of length n used to score the clusterings. */
MISC_API misc_status misc_run(const misc_matrix* X, const misc_config* cfg,
                              const uint32_t* const* views, const char* const* view_names,
                              size_t num_views, misc_report** out);

MISC_API size_t misc_report_num_clusterings(const misc_report* r);
MISC_API size_t misc_report_num_samples(const misc_report* r);

/* Cluster count of clustering `idx`. */
MISC_API misc_status misc_report_k(const misc_report* r, size_t idx, size_t* out);

/* Copies the labels of clustering `idx` into `buffer` (length n). */
MISC_API misc_status misc_report_labels(const misc_report* r, size_t idx, uint32_t* buffer,
                                        size_t len);

/* Serializes the full run report; free the string with misc_string_free. */
MISC_API misc_status misc_report_json(const misc_report* r, char** out);

MISC_API void misc_report_free(misc_report* r);

/* ---- single-variant factorization ------------------------------------- */

/* variant: "snmf", "gsnmf", "ksnmf" or "kgsnmf". Solver settings (lambda,
 * kernel, eps_neighbors, max_iter, rel_tol, seed) are read from `cfg`. */
MISC_API misc_status misc_ablate(const misc_matrix* X, const char* variant, size_t k,
                                 const misc_config* cfg, misc_ablation** out);

MISC_API size_t misc_ablation_iterations(const misc_ablation* a);
MISC_API int misc_ablation_converged(const misc_ablation* a);
MISC_API size_t misc_ablation_trace_len(const misc_ablation* a);
MISC_API misc_status misc_ablation_objective_trace(const misc_ablation* a, double* buffer,
                                                   size_t len);

/* Hard labels obtained by k-means on the soft assignment matrix. */
MISC_API misc_status misc_ablation_labels(const misc_ablation* a, uint32_t* buffer, size_t len);

MISC_API void misc_ablation_free(misc_ablation* a);

/* ---- metrics ----------------------------------------------------------- */

MISC_API misc_status misc_nmi(const uint32_t* a, const uint32_t* b, size_t n, double* out);
MISC_API misc_status misc_f1_pairs(const uint32_t* a, const uint32_t* b, size_t n, double* out);

/* Scores every clustering against every view; returns the report as JSON
 * (rows are clusterings, columns views, cells carry f1 and nmi). */
MISC_API misc_status misc_evaluate_views(const uint32_t* const* clusterings,
                                         size_t num_clusterings, const uint32_t* const* views,
                                         const char* const* view_names, size_t num_views, size_t n,
                                         char** json_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MISC_H */
