/* stirlab: contact process with rapid stirring -- simulator and
 * random-walk analytics.
 *
 * Plain C interface over the C++ core: opaque handles, integer status
 * codes, caller-owned output buffers. Every function returns STIR_OK on
 * success; on failure stir_last_error() carries a human-readable detail
 * message for the calling thread.
 */
#ifndef STIRLAB_H
#define STIRLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define STIR_API __declspec(dllexport)
#else
#define STIR_API __attribute__((visibility("default")))
#endif

typedef enum stir_status {
  STIR_OK = 0,
  STIR_E_ARG = 1,        /* invalid argument / precondition violation */
  STIR_E_DIVERGENT = 2,  /* series diverges (d <= 2) */
  STIR_E_BUDGET = 3,     /* memory or replication budget exceeded */
  STIR_E_TRUNCATION = 4, /* table truncation insufficient for the request */
  STIR_E_QUADRATURE = 5, /* numerical integration failed to converge */
  STIR_E_INTERNAL = 6
} stir_status;

STIR_API const char* stir_status_name(stir_status s);
/* Thread-local detail message for the most recent failing call. */
STIR_API const char* stir_last_error(void);
STIR_API const char* stir_version(void);

/* Documented avalanche seed mixer: replicate i of master seed s draws its
 * random stream from stir_mix_seed(s, i). */
STIR_API uint64_t stir_mix_seed(uint64_t master, uint64_t stream);

/* ------------------------------------------------------------------ */
/* Random-walk analytics (one handle caches series for one dimension). */

typedef struct stir_walk stir_walk;

STIR_API stir_status stir_walk_create(int d, stir_walk** out);
STIR_API void stir_walk_free(stir_walk* w);

/* p_n(0) and P(V_n in the origin neighborhood). */
STIR_API stir_status stir_walk_return_prob(stir_walk* w, int n, double* out);
STIR_API stir_status stir_walk_neighbor_prob(stir_walk* w, int n, double* out);

/* max_{1<=n<=n_max} |p_n(0) - (1/2d) P(V_{n-1} in dd)| */
STIR_API stir_status stir_walk_identity_residual(stir_walk* w, int n_max,
                                                 double* out);

typedef struct stir_series_result {
  int d;
  int n_used;
  double partial_sum;
  double tail_bound;
  double theta;
  double green;
  double tolerance; /* reported half-width on theta */
  int converged;
} stir_series_result;

/* Truncated series for theta and G(0,0); n_cap <= 0 picks a default from
 * the internal budget. A non-converged result is still filled in. */
STIR_API stir_status stir_walk_series(stir_walk* w, double tol, int n_cap,
                                      stir_series_result* out);

/* h(u) = P(W + V_pi(u) in dd); n_max <= 0 derives the truncation from the
 * Poisson tail (< 1e-10). */
STIR_API stir_status stir_walk_h(stir_walk* w, double u, int n_max,
                                 double* out);

/* E int_0^t 1(V_s in dd) ds for the rate-4dN^2 walk from the origin. */
STIR_API stir_status stir_walk_occupation_analytic(stir_walk* w, double N,
                                                   double t, double* out);

/* Exact pmf value p_n(x); x points at d coordinates. Requires n within the
 * handle's built range (functions above grow it). */
STIR_API stir_status stir_walk_pmf(stir_walk* w, int n, const int32_t* x,
                                   double* out);

/* ------------------------------------------------------------------ */
/* Monte Carlo estimates. */

typedef struct stir_estimate {
  double mean;
  double sem; /* standard error of the mean */
  uint64_t reps;
} stir_estimate;

/* Occupation time of dd over [0,t] for the plain walk V (chain = 'v') or
 * the two-particle difference chain W (chain = 'w'). */
STIR_API stir_status stir_occupation_mc(int d, double N, double t,
                                        uint64_t reps, uint64_t seed,
                                        int threads, char chain,
                                        stir_estimate* out);

/* ------------------------------------------------------------------ */
/* Genealogy (single lineage over [0, tau_N), tau_N = ln N / N^2). */

typedef struct stir_lineage_result {
  double f1_mean, f1_sem;
  double z1_mean, z1_sem;
  uint64_t reps;
} stir_lineage_result;

STIR_API stir_status stir_lineage_mc(int d, double N, double theta,
                                     uint64_t reps, uint64_t seed, int threads,
                                     stir_lineage_result* out);

STIR_API stir_status stir_f1_analytic(double N, double theta, double* out);

/* variant 0: exponent consistent with the F1 closed form (default);
 * variant 1: the alternate printed exponent (differs when theta != 0). */
STIR_API stir_status stir_z1_analytic(stir_walk* w, double N, double theta,
                                      int variant, double* out);

/* ------------------------------------------------------------------ */
/* Contact-process simulator. */

typedef struct stir_model_params {
  int d;
  double N;      /* stirring rate */
  double lambda; /* total birth rate */
  int speeded_up;
} stir_model_params;

typedef struct stir_stop_policy {
  double horizon;
  uint64_t mass_cap;
  const double* checkpoints; /* sorted, within [0, horizon]; may be NULL */
  size_t n_checkpoints;
  uint64_t event_budget; /* 0: default 1e9 */
} stir_stop_policy;

typedef enum stir_outcome {
  STIR_OUTCOME_EXTINCT = 0,
  STIR_OUTCOME_MASS_CAP = 1,
  STIR_OUTCOME_HORIZON = 2,
  STIR_OUTCOME_TRUNCATED = 3
} stir_outcome;

typedef struct stir_trajectory_summary {
  int outcome; /* stir_outcome */
  double outcome_time;
  uint64_t event_count;
} stir_trajectory_summary;

/* mass_out / pairs_out may be NULL or arrays of n_checkpoints entries. */
STIR_API stir_status stir_run_trajectory(const stir_model_params* p,
                                         const stir_stop_policy* stop,
                                         uint64_t seed,
                                         stir_trajectory_summary* out,
                                         uint64_t* mass_out,
                                         int64_t* pairs_out);

/* Per-checkpoint pooled means; every array sized n_checkpoints (any may be
 * NULL). drop_mean/drop_sem are paired statistics of
 * mass(previous checkpoint) - mass(this checkpoint). */
STIR_API stir_status stir_mass_curve(const stir_model_params* p,
                                     const stir_stop_policy* stop,
                                     uint64_t reps, uint64_t seed, int threads,
                                     double* mass_mean, double* mass_sem,
                                     double* pairs_mean, double* pairs_sem,
                                     double* drop_mean, double* drop_sem);

/* ------------------------------------------------------------------ */
/* Estimators. */

typedef struct stir_survival_estimate {
  uint64_t reps;
  uint64_t successes;
  double rho_hat;
  double ci_low, ci_high; /* Wilson 95% */
} stir_survival_estimate;

STIR_API stir_status stir_survival(const stir_model_params* p,
                                   const stir_stop_policy* stop, uint64_t reps,
                                   uint64_t seed, int threads,
                                   stir_survival_estimate* out);

STIR_API stir_status stir_wilson(uint64_t successes, uint64_t trials, double z,
                                 double* low, double* high);

typedef struct stir_scan_settings {
  double threshold;     /* <= 0: default 0.05 */
  uint64_t reps_initial; /* 0: default 1000 */
  uint64_t reps_cap;     /* 0: default 100000 per level */
  double tol_lambda;    /* <= 0: default theta_ref / (4N) */
  double theta_ref;     /* <= 0: computed from the walk series */
} stir_scan_settings;

typedef struct stir_scan stir_scan;

STIR_API stir_status stir_scan_run(int d, double N,
                                   const stir_scan_settings* settings,
                                   const stir_stop_policy* stop, uint64_t seed,
                                   int threads, stir_scan** out);
STIR_API void stir_scan_free(stir_scan* s);

STIR_API stir_status stir_scan_bracket(const stir_scan* s, double* lambda_lo,
                                       double* lambda_hat, double* lambda_hi);
STIR_API int stir_scan_inconclusive(const stir_scan* s);
STIR_API size_t stir_scan_n_levels(const stir_scan* s);

typedef struct stir_scan_level {
  double lambda;
  uint64_t reps;
  uint64_t successes;
  double rho_hat;
  double ci_low, ci_high;
  int verdict; /* +1 supercritical, -1 subcritical, 0 inconclusive */
} stir_scan_level;

STIR_API stir_status stir_scan_level_at(const stir_scan* s, size_t i,
                                        stir_scan_level* out);
/* Semicolon-joined diagnostic flags (empty string when clean). */
STIR_API const char* stir_scan_flags(const stir_scan* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* STIRLAB_H */
