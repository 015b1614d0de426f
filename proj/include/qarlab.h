/*
 * qarlab C API: Bayesian joint (non-crossing) quantile autoregression.
 *
 * All entry points return a qarlab_status code; QARLAB_OK is zero. Calls
 * taking a qarlab_ctx record a human-readable message retrievable with
 * qarlab_last_error on failure. Pipeline functions consume a JSON
 * configuration document (see the project README for the schema) and
 * write their artifacts to the configured output directory.
 */

#ifndef QARLAB_H
#define QARLAB_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qarlab_status {
    QARLAB_OK = 0,
    QARLAB_EINVAL = 1,   /* invalid argument / null pointer */
    QARLAB_EDOMAIN = 2,  /* domain violation in inputs or config */
    QARLAB_ENUMERIC = 3, /* numerical failure */
    QARLAB_EIO = 4,      /* file system failure */
    QARLAB_EPARSE = 5,   /* malformed CSV/JSON input */
    QARLAB_EINTERNAL = 6 /* unexpected internal error */
} qarlab_status;

typedef struct qarlab_ctx qarlab_ctx;
typedef struct qarlab_model qarlab_model;

unsigned qarlab_version(void);

qarlab_ctx* qarlab_ctx_new(void);
void qarlab_ctx_free(qarlab_ctx* ctx);
/* Message from the most recent failing call on this context. */
const char* qarlab_last_error(const qarlab_ctx* ctx);

/* Config-driven pipelines; artifacts are written to config.out_dir. */
int qarlab_run_fit(qarlab_ctx* ctx, const char* config_json);
int qarlab_run_simulate(qarlab_ctx* ctx, const char* config_json);
int qarlab_run_coverage(qarlab_ctx* ctx, const char* config_json);
int qarlab_run_assess(qarlab_ctx* ctx, const char* config_json);
int qarlab_run_krige(qarlab_ctx* ctx, const char* config_json);

/* Scalar primitives. */
int qarlab_kuma_cdf(double x, double a, double b, double* out);
int qarlab_kuma_pdf(double x, double a, double b, double* out);
int qarlab_kuma_quantile(double tau, double a, double b, double* out);
int qarlab_normal_cdf(double x, double* out);
int qarlab_normal_quantile(double p, double* out);

/*
 * Model handle built from a JSON description:
 *   {"curves":[{"components":[{"a":..,"b":..},...],"weights":[...]},...],
 *    "lag_weights":[...]}
 * with p+1 curves and, for p >= 2, p lag weights.
 */
int qarlab_model_from_json(qarlab_ctx* ctx, const char* model_json,
                           qarlab_model** out);
void qarlab_model_free(qarlab_model* model);

int qarlab_model_quantile(qarlab_ctx* ctx, const qarlab_model* model,
                          double tau, const double* lags, int n_lags,
                          double* out);
int qarlab_model_inverse_tau(qarlab_ctx* ctx, const qarlab_model* model,
                             double y, const double* lags, int n_lags,
                             double* out);
int qarlab_model_density(qarlab_ctx* ctx, const qarlab_model* model, double y,
                         const double* lags, int n_lags, double* out);
int qarlab_model_log_likelihood(qarlab_ctx* ctx, const qarlab_model* model,
                                const double* y, int n, double* out);

#ifdef __cplusplus
}
#endif

#endif /* QARLAB_H */
