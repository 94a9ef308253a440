/*
 * penlik - penalized likelihood estimation with folded-concave penalties:
 * scalar thresholding rules, LQA fitting of penalized GLM / Cox partial
 * likelihoods, GCV tuning, sandwich covariance, sparse covariance estimation
 * and q-class losses.
 *
 * C interface over the C++ core: opaque handles, status codes, row-major
 * double buffers. Every function returns PENLIK_OK on success; on failure the
 * thread-local message from penlik_last_error() describes what went wrong.
 */
#ifndef PENLIK_H
#define PENLIK_H

#include <stdint.h>

#if defined(_WIN32)
#define PENLIK_API __declspec(dllexport)
#else
#define PENLIK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  PENLIK_OK = 0,
  PENLIK_ERR_INVALID_ARGUMENT = 1,
  PENLIK_ERR_NUMERICAL = 2,
  PENLIK_ERR_IO = 3,
  PENLIK_ERR_INTERNAL = 4
} penlik_status;

typedef enum {
  PENLIK_PENALTY_HARD = 0,
  PENLIK_PENALTY_ENTROPY = 1,
  PENLIK_PENALTY_L1 = 2,
  PENLIK_PENALTY_L2 = 3,
  PENLIK_PENALTY_BRIDGE = 4,
  PENLIK_PENALTY_SCAD = 5
} penlik_penalty_kind;

typedef enum {
  PENLIK_FAMILY_GAUSSIAN = 0,
  PENLIK_FAMILY_LOGISTIC = 1,
  PENLIK_FAMILY_POISSON = 2
} penlik_family;

typedef enum {
  PENLIK_LOSS_MISCLASSIFICATION = 0,
  PENLIK_LOSS_HINGE = 1,
  PENLIK_LOSS_EXPONENTIAL = 2,
  PENLIK_LOSS_QUADRATIC = 3
} penlik_loss_kind;

PENLIK_API const char* penlik_version(void);
/* Thread-local message describing the most recent failure. */
PENLIK_API const char* penlik_last_error(void);
PENLIK_API void penlik_string_free(char* s);

/* ---- penalty family ----------------------------------------------------
 * shape: SCAD a, Bridge exponent q, L2 quadratic coefficient; pass 0 for the
 * per-kind default (3.7 / 0.5 / 1.0). */
PENLIK_API penlik_status penlik_penalty_value(int kind, double lambda, double shape,
                                              double beta_abs, double* out);
PENLIK_API penlik_status penlik_penalty_deriv(int kind, double lambda, double shape,
                                              double beta_abs, double* out);
PENLIK_API penlik_status penlik_penalty_deriv_zero_plus(int kind, double lambda, double shape,
                                                        double* out);
/* Global minimizer of (1/2)(z-b)^2 + p_lambda(|b|). */
PENLIK_API penlik_status penlik_threshold(int kind, double lambda, double shape, double z,
                                          double* out);
PENLIK_API penlik_status penlik_check_properties(int kind, double lambda, double shape,
                                                 int* sparsity, int* unbiasedness,
                                                 int* continuity);
/* sigma * sqrt(2 log(n) / n). */
PENLIK_API penlik_status penlik_universal_lambda(int64_t n, double sigma, double* out);
/* Componentwise thresholding of coefficient-scale observations z[0..d). */
PENLIK_API penlik_status penlik_fit_orthonormal(const double* z, int64_t d, int kind,
                                                double lambda, double shape, int use_universal,
                                                int64_t n, double sigma, double* out);

/* ---- datasets ---------------------------------------------------------- */
typedef struct penlik_dataset penlik_dataset;

/* x is row-major n x d. */
PENLIK_API penlik_status penlik_dataset_create(const double* x, int64_t n, int64_t d,
                                               const double* y, penlik_dataset** out);
PENLIK_API penlik_status penlik_dataset_create_survival(const double* x, int64_t n, int64_t d,
                                                        const double* time, const int32_t* status,
                                                        penlik_dataset** out);
/* Regression layout "y,x1..xd"; survival layout "time,status,x1..xd". */
PENLIK_API penlik_status penlik_dataset_read_csv(const char* path, int is_survival,
                                                 penlik_dataset** out);
PENLIK_API penlik_status penlik_dataset_write_csv(const penlik_dataset* ds, const char* path);
PENLIK_API int64_t penlik_dataset_n(const penlik_dataset* ds);
PENLIK_API int64_t penlik_dataset_d(const penlik_dataset* ds);
PENLIK_API int penlik_dataset_is_survival(const penlik_dataset* ds);
PENLIK_API void penlik_dataset_free(penlik_dataset* ds);

/* Plain numeric CSV (header row skipped) into a malloc'd row-major buffer;
 * release with penlik_buffer_free. */
PENLIK_API penlik_status penlik_read_matrix_csv(const char* path, double** data, int64_t* n,
                                                int64_t* d);
PENLIK_API void penlik_buffer_free(double* data);

/* ---- penalized fits ----------------------------------------------------- */
typedef struct penlik_fit penlik_fit;

typedef struct {
  double tol;        /* coefficient-change tolerance (default 1e-8) */
  int max_iter;      /* default 200 */
  double clamp_tau;  /* 0 = 1e-6 * max|initial coefficient| */
  int init;          /* 0 = unpenalized MLE (zeros fallback), 1 = zeros */
} penlik_lqa_options;

PENLIK_API void penlik_lqa_options_init(penlik_lqa_options* opts);

/* lambda_per_coord has length d; an entry of 0 leaves that coordinate
 * unpenalized. opts may be NULL for defaults. */
PENLIK_API penlik_status penlik_fit_glm(const penlik_dataset* ds, int family, int penalty_kind,
                                        double shape, const double* lambda_per_coord,
                                        const penlik_lqa_options* opts, penlik_fit** out);
PENLIK_API penlik_status penlik_fit_cox(const penlik_dataset* ds, int penalty_kind, double shape,
                                        const double* lambda_per_coord,
                                        const penlik_lqa_options* opts, penlik_fit** out);
/* Penalized empirical risk minimization over +-1 labels. */
PENLIK_API penlik_status penlik_fit_erm(const penlik_dataset* ds, int loss_kind,
                                        double hinge_delta, int penalty_kind, double shape,
                                        const double* lambda_per_coord, penlik_fit** out);

PENLIK_API int64_t penlik_fit_dim(const penlik_fit* fit);
PENLIK_API penlik_status penlik_fit_coefficients(const penlik_fit* fit, double* out);
PENLIK_API int64_t penlik_fit_n_active(const penlik_fit* fit);
PENLIK_API penlik_status penlik_fit_active_set(const penlik_fit* fit, int64_t* out);
PENLIK_API int penlik_fit_converged(const penlik_fit* fit);
PENLIK_API int penlik_fit_iterations(const penlik_fit* fit);
PENLIK_API double penlik_fit_objective(const penlik_fit* fit);
PENLIK_API penlik_status penlik_fit_sigma_lambda(const penlik_fit* fit, double* out);
/* Max-norm of the penalized likelihood equation over the active set. */
PENLIK_API penlik_status penlik_fit_stationarity_max(const penlik_fit* fit, double* out);
PENLIK_API penlik_status penlik_fit_effective_params(const penlik_fit* fit, double* out);
PENLIK_API penlik_status penlik_fit_gcv(const penlik_fit* fit, double* out);
/* Sandwich covariance over the active set; cov must hold n_active^2 doubles. */
PENLIK_API penlik_status penlik_fit_sandwich(const penlik_fit* fit, double* cov);
/* Exact hinge objective reported next to a smoothed-hinge ERM fit. */
PENLIK_API penlik_status penlik_fit_exact_hinge_objective(const penlik_fit* fit, double* out);
PENLIK_API penlik_status penlik_fit_to_json(const penlik_fit* fit, char** out);
PENLIK_API void penlik_fit_free(penlik_fit* fit);

/* ---- GCV tuning --------------------------------------------------------- */
typedef struct penlik_tuning penlik_tuning;

/* grid may be NULL (auto grid of grid_size points up to the soft-rule
 * lambda_max); penalty_factor may be NULL (all ones), entries of 0 leave
 * coordinates unpenalized. family -1 tunes a Cox fit on survival data. */
PENLIK_API penlik_status penlik_tune(const penlik_dataset* ds, int family, int penalty_kind,
                                     double shape, const double* penalty_factor,
                                     const double* grid, int64_t grid_len, int grid_size,
                                     penlik_tuning** out);
PENLIK_API int64_t penlik_tuning_grid_len(const penlik_tuning* t);
PENLIK_API penlik_status penlik_tuning_grid(const penlik_tuning* t, double* lambdas,
                                            double* scores, double* eff_params);
PENLIK_API double penlik_tuning_chosen_lambda(const penlik_tuning* t);
PENLIK_API int64_t penlik_tuning_chosen_index(const penlik_tuning* t);
PENLIK_API penlik_status penlik_tuning_per_coordinate_lambda(const penlik_tuning* t, double* out);
/* Returns a new fit handle for the chosen lambda. */
PENLIK_API penlik_status penlik_tuning_fit(const penlik_tuning* t, penlik_fit** out);
PENLIK_API penlik_status penlik_tuning_to_json(const penlik_tuning* t, char** out);
PENLIK_API void penlik_tuning_free(penlik_tuning* t);

/* ---- covariance estimation ---------------------------------------------- */
typedef struct penlik_chol_cov penlik_chol_cov;

/* w is row-major n x d. use_gcv=0 fits every row at fixed_lambda (0 = OLS). */
PENLIK_API penlik_status penlik_cov_cholesky(const double* w, int64_t n, int64_t d,
                                             int penalty_kind, double shape, int use_gcv,
                                             double fixed_lambda, penlik_chol_cov** out);
PENLIK_API int64_t penlik_chol_cov_dim(const penlik_chol_cov* c);
/* Any output may be NULL; buffers are d*d (phi, sigma, precision) or d (d_diag). */
PENLIK_API penlik_status penlik_chol_cov_get(const penlik_chol_cov* c, double* phi,
                                             double* d_diag, double* sigma, double* precision);
PENLIK_API penlik_status penlik_chol_cov_to_json(const penlik_chol_cov* c, char** out);
PENLIK_API void penlik_chol_cov_free(penlik_chol_cov* c);

typedef struct penlik_factor_cov penlik_factor_cov;

/* returns: row-major n x d excess returns; f: row-major n x k factors. */
PENLIK_API penlik_status penlik_cov_factor(const double* returns, int64_t n, int64_t d,
                                           const double* f, int64_t k, penlik_factor_cov** out);
PENLIK_API penlik_status penlik_factor_cov_get(const penlik_factor_cov* c, double* loadings,
                                               double* cov_f, double* sigma0, double* sigma);
PENLIK_API penlik_status penlik_factor_cov_to_json(const penlik_factor_cov* c, char** out);
PENLIK_API void penlik_factor_cov_free(penlik_factor_cov* c);

/* Eigenvalue / portfolio-risk / precision-metric / inverse-Frobenius report
 * for each d x d estimate against sigma_true, as JSON. */
PENLIK_API penlik_status penlik_compare_estimators_json(const double* sigma_true, int64_t d,
                                                        const double* const* estimates,
                                                        int64_t n_estimates, const double* xi,
                                                        char** out);

/* ---- q-class losses ------------------------------------------------------ */
/* l(y, m) = q(m) - q(y) - q'(m)(m - y); c is the quadratic q's linear
 * coefficient (it cancels in the loss). */
PENLIK_API penlik_status penlik_qloss_value(int loss_kind, double c, double y, double m_hat,
                                            double* out);
/* Monte Carlo excess risk E l(g(X'bhat), Y) - E l(g(X'bstar), Y) under the
 * linear generator y = x'beta_true + sigma eps (labels sign(y) for
 * classification losses); paired draws. */
PENLIK_API penlik_status penlik_risk_gap(int loss_kind, const double* beta_hat,
                                         const double* beta_star, const double* beta_true,
                                         int64_t d, double sigma, double ar_rho, int64_t mc_n,
                                         uint64_t seed, double* gap, double* std_error);

/* ---- best-subset oracle and classical criteria -------------------------- */
/* Exhaustive minimizer of RSS/(2n) + (lambda^2/2)|M|. subset must hold d
 * entries; *subset_len receives the selected size. beta (length d) may be
 * NULL. */
PENLIK_API penlik_status penlik_best_subset(const penlik_dataset* ds, double lambda, int max_d,
                                            int64_t* subset, int64_t* subset_len, double* beta);
/* Per-subset RSS / adjusted R^2 / GCV(m) / PLS score over all column subsets
 * (intercept implicit), as JSON. */
PENLIK_API penlik_status penlik_classical_criteria_json(const penlik_dataset* ds, double lambda,
                                                        int max_d, char** out);

/* ---- experiments and data generation ------------------------------------ */
/* config_json: {"kind": ..., "seed": ..., ...}; returns the report as JSON. */
PENLIK_API penlik_status penlik_experiment_run(const char* config_json, char** report_json);
/* Writes the generated sample to data_path (CSV) and returns a JSON report. */
PENLIK_API penlik_status penlik_generate(const char* config_json, const char* data_path,
                                         char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* PENLIK_H */
