/*
 * nomasec — ergodic secrecy rates for two-user downlink NOMA under underlay
 * spectrum sharing with multiple primary receivers and imperfect CSI.
 *
 * C API of the shared library. All functions are thread-safe; configs are
 * immutable while any evaluation on them is in flight on another thread.
 * Every quantity is linear and noise-normalized (convert dB at your boundary:
 * x_linear = 10^(x_dB/10)). Rates are in bits/s/Hz.
 */
#ifndef NOMASEC_H
#define NOMASEC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NOMASEC_API __declspec(dllexport)
#else
#define NOMASEC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum noma_status {
    NOMA_OK = 0,
    NOMA_ERR_INVALID_ARGUMENT = 1, /* bad pointer, out-of-domain scalar */
    NOMA_ERR_MODEL = 2,            /* scenario violates a model invariant */
    NOMA_ERR_CONVERGENCE = 3,      /* quadrature/bisection budget exhausted */
    NOMA_ERR_NON_MONOTONE = 4,     /* allocation pre-scan failed */
    NOMA_ERR_INTERNAL = 5
} noma_status;

typedef enum noma_rate_mode {
    NOMA_RATE_NOMA_STRONG = 0,
    NOMA_RATE_NOMA_WEAK = 1,
    NOMA_RATE_OMA_STRONG = 2,
    NOMA_RATE_OMA_WEAK = 3
} noma_rate_mode;

typedef enum noma_user { NOMA_USER_STRONG = 0, NOMA_USER_WEAK = 1 } noma_user;

typedef enum noma_alloc_status {
    NOMA_ALLOC_CONVERGED = 0,
    NOMA_ALLOC_CLAMPED_LOW = 1,
    NOMA_ALLOC_CLAMPED_HIGH = 2
} noma_alloc_status;

/* Opaque scenario handle. */
typedef struct noma_config noma_config;

typedef struct noma_esr_breakdown {
    double total;         /* bits/s/Hz, >= 0 */
    double components[4]; /* total = c0 + c1 - c2 - c3 */
    int clamped;          /* 1 when a tiny negative total was clamped to 0 */
} noma_esr_breakdown;

typedef struct noma_mc_estimate {
    double mean;
    double std_err;
    uint64_t n;
} noma_mc_estimate;

typedef struct noma_allocation_result {
    double a_s;
    double a_w;
    double achieved_gap;
    int iterations;
    noma_alloc_status status;
    double oma_target;
} noma_allocation_result;

NOMASEC_API const char* noma_version(void);
NOMASEC_API const char* noma_status_name(noma_status status);
/* Message for the most recent failure on the calling thread. */
NOMASEC_API const char* noma_last_error(void);

/* --- configuration ----------------------------------------------------- */

/* Fresh config with the library defaults (d_n/d_f/d_e = 30/100/150 m, four
 * PRs at 200..215 m, alpha = 2, sigma_eps2 = 2e-5, P_max = 50 dB,
 * I_p = 10 dB, a_s = 0.2). Returns NULL only on allocation failure. */
NOMASEC_API noma_config* noma_config_create(void);
NOMASEC_API noma_config* noma_config_clone(const noma_config* cfg);
NOMASEC_API void noma_config_destroy(noma_config* cfg);

NOMASEC_API noma_status noma_config_set_user_distances(noma_config* cfg, double d_near,
                                                       double d_far);
NOMASEC_API noma_status noma_config_set_eve_distance(noma_config* cfg, double d_eve);
NOMASEC_API noma_status noma_config_set_pr_distances(noma_config* cfg, const double* d,
                                                     size_t count);
NOMASEC_API noma_status noma_config_set_alpha(noma_config* cfg, double alpha);
NOMASEC_API noma_status noma_config_set_sigma_eps2(noma_config* cfg, double sigma_eps2);
NOMASEC_API noma_status noma_config_set_p_max(noma_config* cfg, double p_max_linear);
NOMASEC_API noma_status noma_config_set_i_peak(noma_config* cfg, double i_peak_linear);
NOMASEC_API noma_status noma_config_set_power_split(noma_config* cfg, double a_s);

NOMASEC_API double noma_config_d_near(const noma_config* cfg);
NOMASEC_API double noma_config_d_far(const noma_config* cfg);
NOMASEC_API double noma_config_d_eve(const noma_config* cfg);
NOMASEC_API size_t noma_config_pr_count(const noma_config* cfg);
NOMASEC_API double noma_config_pr_distance(const noma_config* cfg, size_t index);
NOMASEC_API double noma_config_alpha(const noma_config* cfg);
NOMASEC_API double noma_config_sigma_eps2(const noma_config* cfg);
NOMASEC_API double noma_config_p_max(const noma_config* cfg);
NOMASEC_API double noma_config_i_peak(const noma_config* cfg);
NOMASEC_API double noma_config_power_split(const noma_config* cfg);

/* Full invariant check (positivity, a_s in (0, 0.5), every link's path gain
 * above sigma_eps2, PR count in [1, 20]). noma_last_error() names the
 * offending field on failure. */
NOMASEC_API noma_status noma_config_validate(const noma_config* cfg);

/* --- closed-form evaluation -------------------------------------------- */

NOMASEC_API noma_status noma_esr_strong(const noma_config* cfg, noma_esr_breakdown* out);
NOMASEC_API noma_status noma_esr_weak(const noma_config* cfg, noma_esr_breakdown* out);
NOMASEC_API noma_status noma_essr(const noma_config* cfg, double* out);
NOMASEC_API noma_status noma_essr_asymptotic(const noma_config* cfg, double* out);
NOMASEC_API noma_status noma_esr_asymptotic_split(const noma_config* cfg, double* strong,
                                                  double* weak);

/* --- oracles ------------------------------------------------------------ */

/* Monte Carlo estimate. Bit-identical for fixed (cfg, mode, n, seed)
 * regardless of `threads` (0 = auto). `oma_estimation_noise` applies the
 * sigma_eps2 shift to the OMA gains (off = gains enter as printed). */
NOMASEC_API noma_status noma_mc_esr(const noma_config* cfg, noma_rate_mode mode, uint64_t n,
                                    uint64_t seed, int threads, int oma_estimation_noise,
                                    noma_mc_estimate* out);

/* Deterministic nested-quadrature evaluation; rel_tol in [1e-10, 1e-4]. */
NOMASEC_API noma_status noma_quad_esr_strong(const noma_config* cfg, double rel_tol, double* out);
NOMASEC_API noma_status noma_quad_esr_weak(const noma_config* cfg, double rel_tol, double* out);
NOMASEC_API noma_status noma_quad_oma_esr(const noma_config* cfg, noma_user user, double rel_tol,
                                          int estimation_noise, double* out);

/* --- power allocation ---------------------------------------------------- */

/* Bisection on a_s so that the strong user's NOMA ESR matches its OMA ESR
 * (cfg->a_s is ignored). tol is in bits/s/Hz (>= 1e-8). oma_estimation_noise
 * selects the OMA target: 0 = gains as printed, 1 = with the sigma_eps2
 * shift the NOMA rates carry. */
NOMASEC_API noma_status noma_match_strong_user(const noma_config* cfg, double tol, int max_iter,
                                               double oma_rel_tol, int oma_estimation_noise,
                                               noma_allocation_result* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* NOMASEC_H */
