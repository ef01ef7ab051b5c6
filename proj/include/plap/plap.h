/* C interface to the p-Laplacian solver and verification harness.
 *
 * All entry points return a plap_status; on failure a human-readable message is
 * copied into the caller's buffer (always NUL-terminated, possibly truncated).
 * Handles are opaque and must be released with their matching _free call.
 */
#ifndef PLAP_PLAP_H
#define PLAP_PLAP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PLAP_API __declspec(dllexport)
#else
#define PLAP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum plap_status {
    PLAP_OK = 0,
    PLAP_ERR_INVALID_ARGUMENT = 1, /* bad parameter or constraint violation */
    PLAP_ERR_PARSE = 2,            /* config text rejected */
    PLAP_ERR_RUNTIME = 3,          /* solver failure (divergence, NaN, ...) */
    PLAP_ERR_IO = 4                /* filesystem failure */
} plap_status;

/* Experiment kinds reported by plap_config_kind. */
enum {
    PLAP_KIND_RUN = 0,
    PLAP_KIND_LADDER = 1,
    PLAP_KIND_EXTINCTION_SWEEP = 2,
    PLAP_KIND_DUAL_CHECK = 3,
    PLAP_KIND_GALERKIN_COMPARE = 4,
    PLAP_KIND_GAMMA = 5
};

typedef struct plap_config plap_config;

PLAP_API const char* plap_version(void);

/* Parse and validate a config; *out owns the handle on PLAP_OK. */
PLAP_API plap_status plap_config_parse_string(const char* text, plap_config** out,
                                              char* errbuf, size_t errlen);
PLAP_API plap_status plap_config_parse_file(const char* path, plap_config** out,
                                            char* errbuf, size_t errlen);
PLAP_API void plap_config_free(plap_config* cfg);

PLAP_API plap_status plap_config_kind(const plap_config* cfg, int* kind);
PLAP_API plap_status plap_config_set_output_dir(plap_config* cfg, const char* dir);

/* Execute the experiment described by cfg. *all_ok is set to 1 when every job
 * succeeded, 0 otherwise (partial outputs stay on disk with ERROR markers). */
PLAP_API plap_status plap_run_experiment(const plap_config* cfg, int* all_ok,
                                         char* errbuf, size_t errlen);

/* Discrete Sobolev-type constant: smallest found Rayleigh quotient
 * ||grad u||_p^p / ||u||_2^p over the interior grid (dim in 1..3, n nodes per
 * axis, p in (3/2, 2]). */
PLAP_API plap_status plap_gamma_estimate(int dim, int n, double p, int seeds,
                                         uint64_t rng_seed, double* out, char* errbuf,
                                         size_t errlen);

/* Extinction-time bound p' ||u0||_2^{2-p} / ((gamma - L)(2-p)) with
 * L = |delta| ||u0||_inf^{2/(p-1)} ||u0||_2^{2-p}. *defined is 0 (and *out is
 * untouched) when L >= gamma or p >= 2. */
PLAP_API plap_status plap_t_star_bound(double u0_l2, double u0_linf, double p,
                                       double delta, double gamma, double* out,
                                       int* defined, char* errbuf, size_t errlen);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PLAP_PLAP_H */
