/* tracecvx C API.
 *
 * Every function returns a tcx_status. On failure the message for the
 * calling thread is available from tcx_last_error() until the next call on
 * that thread. Objects and strings handed out by the library are released
 * with tcx_matrix_free() and tcx_string_free().
 *
 * Matrix JSON: {"dim": n, "entries": [[[re, im], ...], ...], "factors": [d1, d2]}
 * with "factors" optional (needed by psi, entropy-based and tensor calls).
 */
#ifndef TRACECVX_TRACECVX_H
#define TRACECVX_TRACECVX_H

#include <stddef.h>
#include <stdint.h>

#if defined(TRACECVX_BUILDING_LIBRARY)
#define TCX_API __attribute__((visibility("default")))
#else
#define TCX_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tcx_status {
  TCX_OK = 0,
  TCX_INVALID_ARGUMENT = 1,
  TCX_SCHEMA = 2,
  TCX_NON_HERMITIAN_INPUT = 3,
  TCX_NOT_PSD = 4,
  TCX_SINGULAR_POWER = 5,
  TCX_DIM_MISMATCH = 6,
  TCX_BAD_FACTOR_INDEX = 7,
  TCX_NOT_BIPARTITE = 8,
  TCX_NOT_TRIPARTITE = 9,
  TCX_NOT_A_DENSITY_MATRIX = 10,
  TCX_BAD_REGIME = 11,
  TCX_GROUP_TOO_LARGE = 12,
  TCX_SEARCH_EXHAUSTED = 13,
  TCX_NOT_A_CONTRACTION = 14,
  TCX_SINGULAR_CORE = 15,
  TCX_SINGULAR_PROBE = 16,
  TCX_IO = 17,
  TCX_INTERNAL = 99
} tcx_status;

typedef struct tcx_matrix tcx_matrix;

TCX_API const char* tcx_version(void);
TCX_API const char* tcx_status_name(tcx_status status);
TCX_API const char* tcx_last_error(void);

TCX_API tcx_status tcx_matrix_from_json(const char* json, tcx_matrix** out);
TCX_API tcx_status tcx_matrix_load(const char* path, tcx_matrix** out);
/* Row-major real and imaginary parts (im may be NULL). factors may be NULL
 * when num_factors is 0. */
TCX_API tcx_status tcx_matrix_from_entries(int dim, const double* re, const double* im,
                                           const int* factors, int num_factors,
                                           tcx_matrix** out);
TCX_API tcx_status tcx_matrix_to_json(const tcx_matrix* m, char** out);
TCX_API int tcx_matrix_dim(const tcx_matrix* m);
TCX_API void tcx_matrix_free(tcx_matrix* m);
TCX_API void tcx_string_free(char* s);

/* Scalar functionals. Operands must be PSD (Hermitian within 1e-12), except
 * for tcx_schatten_norm, which uses singular values of any square matrix. */
TCX_API tcx_status tcx_phi(const tcx_matrix* const* mats, int m, double p, double q,
                           double* out);
TCX_API tcx_status tcx_psi(const tcx_matrix* a, double p, double q, double* out);
TCX_API tcx_status tcx_upsilon(const tcx_matrix* a, const tcx_matrix* b, double p, double q,
                               double* out);
TCX_API tcx_status tcx_entropy(const tcx_matrix* rho, double* out);
TCX_API tcx_status tcx_ssa_gap(const tcx_matrix* rho, double* out);
TCX_API tcx_status tcx_schatten_norm(const tcx_matrix* a, double q, double* out);
TCX_API tcx_status tcx_skew_information(const tcx_matrix* rho, const tcx_matrix* k,
                                        double* out);

/* JSON reports, released with tcx_string_free. */
TCX_API tcx_status tcx_minkowski(const tcx_matrix* a, double p, double q, char** report);
/* Hermitian x: decomposition-infimum norm. general != 0: half the norm of
 * the block embedding, reported for both groupings. */
TCX_API tcx_status tcx_lqlp_norm(const tcx_matrix* x, double p, double q, int general,
                                 char** report);

/* Exact average over signed permutations on `factor` (n <= 4). */
TCX_API tcx_status tcx_uhlmann_average(const tcx_matrix* a, int factor, tcx_matrix** out);

typedef void (*tcx_line_sink)(const char* line, void* user);

/* Runs a campaign described by a JSON config and streams JSON lines to
 * sink. violations may be NULL. */
TCX_API tcx_status tcx_run_campaign(const char* config_json, tcx_line_sink sink, void* user,
                                    size_t* violations);

TCX_API tcx_status tcx_find_counterexample(double p, double q, int dim, uint64_t seed,
                                           char** fixture);
/* Writes the shipped fixture set into dir. */
TCX_API tcx_status tcx_make_fixtures(const char* dir, uint64_t seed);

#ifdef __cplusplus
}
#endif

#endif
