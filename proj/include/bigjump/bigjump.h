/* SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the bigjump library: heavy-tailed laws, conditional-
 * independence models, and the config-driven analysis runner.
 *
 * Conventions:
 *   - Every function returns a bigjump_status; outputs go through pointers.
 *   - Handles are opaque and freed with the matching *_free call.
 *   - bigjump_last_error() returns a thread-local message for the most
 *     recent failure on the calling thread.
 *   - Strings returned through char** are heap-allocated; release them with
 *     bigjump_free_string.
 */
#ifndef BIGJUMP_BIGJUMP_H
#define BIGJUMP_BIGJUMP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bigjump_status {
  BIGJUMP_OK = 0,
  BIGJUMP_ERR_INVALID_ARGUMENT = 1,
  BIGJUMP_ERR_DOMAIN = 2,
  BIGJUMP_ERR_NO_BOUNDARY_CLASS = 3,
  BIGJUMP_ERR_UNSUPPORTED = 4,
  BIGJUMP_ERR_CONFIG = 5,
  BIGJUMP_ERR_INTERNAL = 6
} bigjump_status;

typedef struct bigjump_law bigjump_law;
typedef struct bigjump_model bigjump_model;

const char* bigjump_version(void);
const char* bigjump_status_name(bigjump_status status);
const char* bigjump_last_error(void);
void bigjump_free_string(char* s);

/* Exponential integral E1(x), x > 0. */
bigjump_status bigjump_expint_e1(double x, double* out);

/* Laws. spec_json: {"name": "pareto", "params": {"alpha": 2.0}} */
bigjump_status bigjump_law_create(const char* spec_json, bigjump_law** out);
void bigjump_law_free(bigjump_law* law);
bigjump_status bigjump_law_tail(const bigjump_law* law, double x, double* out);
bigjump_status bigjump_law_log_tail(const bigjump_law* law, double x, double* out);
bigjump_status bigjump_law_hazard(const bigjump_law* law, double x, double* out);
bigjump_status bigjump_law_hazard_rate(const bigjump_law* law, double x, double* out);
bigjump_status bigjump_law_quantile(const bigjump_law* law, double u, double* out);
bigjump_status bigjump_law_support_lower(const bigjump_law* law, double* out);
/* Deterministic draws: fills out[0..count) from the given seed. */
bigjump_status bigjump_law_sample(const bigjump_law* law, uint64_t seed, size_t count,
                                  double* out);
/* Boundary generator H(x) = 1/hazard_rate(x); fails with
 * BIGJUMP_ERR_NO_BOUNDARY_CLASS for slowly varying laws. */
bigjump_status bigjump_law_boundary_generator(const bigjump_law* law, double x, double* out);

/* Models. spec_json: {"name": "pareto_mixture", "params": {"n": 2}} */
bigjump_status bigjump_model_create(const char* spec_json, bigjump_model** out);
void bigjump_model_free(bigjump_model* model);
bigjump_status bigjump_model_n_max(const bigjump_model* model, int* out);
bigjump_status bigjump_model_real_valued(const bigjump_model* model, int* out);
bigjump_status bigjump_model_reference_tail(const bigjump_model* model, double x, double* out);
/* Draws one latent state into out[0..cap); writes the dimension to *written
 * (fails if cap is too small). */
bigjump_status bigjump_model_sample_latent(const bigjump_model* model, uint64_t seed,
                                           double* out, size_t cap, size_t* written);
/* P(X_i > x | latent); latent must have the model's latent dimension. */
bigjump_status bigjump_model_cond_tail(const bigjump_model* model, int i, double x,
                                       const double* latent, size_t latent_len, double* out);

/* One-shot runner: config JSON in, report JSON out (includes the CSV body
 * under "csv" and the process exit code under "exit_code"). */
bigjump_status bigjump_run(const char* config_json, char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* BIGJUMP_BIGJUMP_H */
