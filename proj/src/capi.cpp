#include "penlik.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <string>

#include <json.hpp>

#include "core/covariance.hpp"
#include "core/cox.hpp"
#include "core/dataset.hpp"
#include "core/errors.hpp"
#include "core/experiments.hpp"
#include "core/glm.hpp"
#include "core/lqa.hpp"
#include "core/penalty.hpp"
#include "core/qloss.hpp"
#include "core/simulate.hpp"
#include "core/subset.hpp"
#include "core/tuning.hpp"

namespace {

using Json = nlohmann::ordered_json;
using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

thread_local std::string g_last_error;

penlik_status fail(penlik_status code, const char* what) {
  g_last_error = what != nullptr ? what : "unknown error";
  return code;
}

template <typename Fn>
penlik_status guarded(Fn&& fn) {
  try {
    fn();
    return PENLIK_OK;
  } catch (const penlik::InvalidArgument& e) {
    return fail(PENLIK_ERR_INVALID_ARGUMENT, e.what());
  } catch (const penlik::IoError& e) {
    return fail(PENLIK_ERR_IO, e.what());
  } catch (const penlik::NumericalError& e) {
    return fail(PENLIK_ERR_NUMERICAL, e.what());
  } catch (const Json::exception& e) {
    return fail(PENLIK_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(PENLIK_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PENLIK_ERR_INTERNAL, "unknown exception");
  }
}

penlik::PenaltySpec make_spec(int kind, double lambda, double shape) {
  if (kind < 0 || kind > 5) throw penlik::InvalidArgument("invalid penalty kind");
  const auto k = static_cast<penlik::PenaltyKind>(kind);
  penlik::PenaltySpec spec{k, lambda, shape == 0.0 ? penlik::default_shape(k) : shape};
  return spec;
}

std::vector<penlik::PenaltySpec> make_penalties(int kind, double shape, const double* lambdas,
                                                Eigen::Index d) {
  if (lambdas == nullptr) throw penlik::InvalidArgument("lambda_per_coord must not be null");
  std::vector<penlik::PenaltySpec> out;
  out.reserve(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) out.push_back(make_spec(kind, lambdas[j], shape));
  return out;
}

penlik::Family family_from(int family) {
  switch (family) {
    case PENLIK_FAMILY_GAUSSIAN: return penlik::Family::Gaussian;
    case PENLIK_FAMILY_LOGISTIC: return penlik::Family::Logistic;
    case PENLIK_FAMILY_POISSON: return penlik::Family::Poisson;
    default: throw penlik::InvalidArgument("invalid family");
  }
}

penlik::LqaConfig config_from(const penlik_lqa_options* opts) {
  penlik::LqaConfig cfg;
  if (opts != nullptr) {
    if (opts->tol > 0.0) cfg.tol = opts->tol;
    if (opts->max_iter > 0) cfg.max_iter = opts->max_iter;
    if (opts->clamp_tau > 0.0) cfg.clamp_tau = opts->clamp_tau;
    cfg.init = opts->init == 1 ? penlik::LqaConfig::Init::Zeros : penlik::LqaConfig::Init::Mle;
  }
  return cfg;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Json vector_json(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

struct penlik_dataset {
  std::shared_ptr<const penlik::Dataset> regression;
  std::shared_ptr<const penlik::SurvivalData> survival;
};

struct penlik_fit {
  std::shared_ptr<const penlik::PenalizedObjective> objective;
  std::vector<penlik::PenaltySpec> penalties;
  penlik::FitResult result;
  double exact_hinge = std::numeric_limits<double>::quiet_NaN();
};

struct penlik_tuning {
  std::shared_ptr<const penlik::PenalizedObjective> objective;
  penlik::TuningResult result;
};

struct penlik_chol_cov {
  penlik::CholeskyCov cov;
};

struct penlik_factor_cov {
  penlik::FactorCov cov;
};

namespace {

Json fit_json(const penlik_fit& fit) {
  Json j;
  j["coefficients"] = vector_json(fit.result.beta);
  Json active = Json::array();
  for (auto idx : fit.result.active_set) active.push_back(static_cast<int64_t>(idx));
  j["active_set"] = active;
  j["objective"] = fit.result.objective;
  j["iterations"] = fit.result.iterations;
  j["converged"] = fit.result.converged;
  j["sigma_lambda"] = vector_json(fit.result.sigma_lambda);
  j["stationarity_max"] =
      penlik::stationarity_max_norm(fit.result, *fit.objective, fit.penalties);
  if (!std::isnan(fit.exact_hinge)) j["exact_hinge_objective"] = fit.exact_hinge;
  return j;
}

}  // namespace

extern "C" {

const char* penlik_version(void) { return "1.0.0"; }

const char* penlik_last_error(void) { return g_last_error.c_str(); }

void penlik_string_free(char* s) { std::free(s); }

penlik_status penlik_penalty_value(int kind, double lambda, double shape, double beta_abs,
                                   double* out) {
  return guarded([&] { *out = penlik::penalty_value(make_spec(kind, lambda, shape), beta_abs); });
}

penlik_status penlik_penalty_deriv(int kind, double lambda, double shape, double beta_abs,
                                   double* out) {
  return guarded([&] { *out = penlik::penalty_deriv(make_spec(kind, lambda, shape), beta_abs); });
}

penlik_status penlik_penalty_deriv_zero_plus(int kind, double lambda, double shape, double* out) {
  return guarded(
      [&] { *out = penlik::penalty_deriv_at_zero_plus(make_spec(kind, lambda, shape)); });
}

penlik_status penlik_threshold(int kind, double lambda, double shape, double z, double* out) {
  return guarded([&] { *out = penlik::threshold(make_spec(kind, lambda, shape), z); });
}

penlik_status penlik_check_properties(int kind, double lambda, double shape, int* sparsity,
                                      int* unbiasedness, int* continuity) {
  return guarded([&] {
    const auto props = penlik::check_properties(make_spec(kind, lambda, shape));
    if (sparsity != nullptr) *sparsity = props.sparsity ? 1 : 0;
    if (unbiasedness != nullptr) *unbiasedness = props.unbiasedness ? 1 : 0;
    if (continuity != nullptr) *continuity = props.continuity ? 1 : 0;
  });
}

penlik_status penlik_universal_lambda(int64_t n, double sigma, double* out) {
  return guarded([&] { *out = penlik::universal_lambda(n, sigma); });
}

penlik_status penlik_fit_orthonormal(const double* z, int64_t d, int kind, double lambda,
                                     double shape, int use_universal, int64_t n, double sigma,
                                     double* out) {
  return guarded([&] {
    const Eigen::Map<const Eigen::VectorXd> zv(z, d);
    const Eigen::VectorXd fitted = penlik::fit_orthonormal(
        zv, make_spec(kind, lambda, shape), use_universal != 0, n, sigma);
    Eigen::Map<Eigen::VectorXd>(out, d) = fitted;
  });
}

penlik_status penlik_dataset_create(const double* x, int64_t n, int64_t d, const double* y,
                                    penlik_dataset** out) {
  return guarded([&] {
    RowMajorMap xm(x, n, d);
    Eigen::Map<const Eigen::VectorXd> yv(y, n);
    auto* ds = new penlik_dataset;
    ds->regression = std::make_shared<penlik::Dataset>(Eigen::MatrixXd(xm), Eigen::VectorXd(yv));
    *out = ds;
  });
}

penlik_status penlik_dataset_create_survival(const double* x, int64_t n, int64_t d,
                                             const double* time, const int32_t* status,
                                             penlik_dataset** out) {
  return guarded([&] {
    RowMajorMap xm(x, n, d);
    Eigen::Map<const Eigen::VectorXd> tv(time, n);
    Eigen::VectorXi sv(n);
    for (int64_t i = 0; i < n; ++i) sv[static_cast<Eigen::Index>(i)] = status[i];
    auto* ds = new penlik_dataset;
    ds->survival = std::make_shared<penlik::SurvivalData>(Eigen::MatrixXd(xm),
                                                          Eigen::VectorXd(tv), std::move(sv));
    *out = ds;
  });
}

penlik_status penlik_dataset_read_csv(const char* path, int is_survival, penlik_dataset** out) {
  return guarded([&] {
    auto* ds = new penlik_dataset;
    try {
      if (is_survival != 0)
        ds->survival = std::make_shared<penlik::SurvivalData>(penlik::read_survival_csv(path));
      else
        ds->regression = std::make_shared<penlik::Dataset>(penlik::read_dataset_csv(path));
    } catch (...) {
      delete ds;
      throw;
    }
    *out = ds;
  });
}

penlik_status penlik_dataset_write_csv(const penlik_dataset* ds, const char* path) {
  return guarded([&] {
    if (ds->regression)
      penlik::write_dataset_csv(path, *ds->regression);
    else
      penlik::write_survival_csv(path, *ds->survival);
  });
}

int64_t penlik_dataset_n(const penlik_dataset* ds) {
  return ds->regression ? ds->regression->n() : ds->survival->n();
}

int64_t penlik_dataset_d(const penlik_dataset* ds) {
  return ds->regression ? ds->regression->d() : ds->survival->d();
}

int penlik_dataset_is_survival(const penlik_dataset* ds) { return ds->survival ? 1 : 0; }

void penlik_dataset_free(penlik_dataset* ds) { delete ds; }

penlik_status penlik_read_matrix_csv(const char* path, double** data, int64_t* n, int64_t* d) {
  return guarded([&] {
    auto [header, values] = penlik::read_csv(path);
    auto* buf = static_cast<double*>(std::malloc(sizeof(double) * values.size()));
    if (buf == nullptr) throw std::bad_alloc();
    for (Eigen::Index i = 0; i < values.rows(); ++i)
      for (Eigen::Index j = 0; j < values.cols(); ++j) buf[i * values.cols() + j] = values(i, j);
    *data = buf;
    *n = values.rows();
    *d = values.cols();
  });
}

void penlik_buffer_free(double* data) { std::free(data); }

void penlik_lqa_options_init(penlik_lqa_options* opts) {
  opts->tol = 1e-8;
  opts->max_iter = 200;
  opts->clamp_tau = 0.0;
  opts->init = 0;
}

penlik_status penlik_fit_glm(const penlik_dataset* ds, int family, int penalty_kind, double shape,
                             const double* lambda_per_coord, const penlik_lqa_options* opts,
                             penlik_fit** out) {
  return guarded([&] {
    if (!ds->regression) throw penlik::InvalidArgument("fit_glm needs a regression dataset");
    auto objective = std::make_shared<penlik::GlmObjective>(
        penlik::GlmModel{family_from(family), 1.0}, *ds->regression);
    auto fit = std::make_unique<penlik_fit>();
    fit->penalties = make_penalties(penalty_kind, shape, lambda_per_coord, objective->dim());
    fit->result = penlik::lqa_fit(*objective, fit->penalties, config_from(opts));
    fit->objective = std::move(objective);
    *out = fit.release();
  });
}

penlik_status penlik_fit_cox(const penlik_dataset* ds, int penalty_kind, double shape,
                             const double* lambda_per_coord, const penlik_lqa_options* opts,
                             penlik_fit** out) {
  return guarded([&] {
    if (!ds->survival) throw penlik::InvalidArgument("fit_cox needs a survival dataset");
    auto objective = std::make_shared<penlik::CoxObjective>(*ds->survival);
    auto fit = std::make_unique<penlik_fit>();
    fit->penalties = make_penalties(penalty_kind, shape, lambda_per_coord, objective->dim());
    fit->result = penlik::lqa_fit(*objective, fit->penalties, config_from(opts));
    fit->objective = std::move(objective);
    *out = fit.release();
  });
}

penlik_status penlik_fit_erm(const penlik_dataset* ds, int loss_kind, double hinge_delta,
                             int penalty_kind, double shape, const double* lambda_per_coord,
                             penlik_fit** out) {
  return guarded([&] {
    if (!ds->regression) throw penlik::InvalidArgument("fit_erm needs a labeled dataset");
    if (loss_kind < 0 || loss_kind > 3) throw penlik::InvalidArgument("invalid loss kind");
    const auto loss = static_cast<penlik::QLossKind>(loss_kind);
    auto fit = std::make_unique<penlik_fit>();
    fit->penalties =
        make_penalties(penalty_kind, shape, lambda_per_coord, ds->regression->d());
    penlik::ErmOptions options;
    if (hinge_delta > 0.0) options.hinge_delta = hinge_delta;
    const penlik::ErmFit erm = penlik::penalized_erm_fit(loss, *ds->regression, fit->penalties,
                                                         options);
    fit->result = erm.fit;
    fit->exact_hinge = erm.exact_hinge_objective;
    // Effective-parameter/sandwich queries evaluate against the smooth
    // objective actually optimized.
    if (loss == penlik::QLossKind::Quadratic)
      fit->objective = std::make_shared<penlik::GlmObjective>(
          penlik::GlmModel{penlik::Family::Gaussian, 0.5}, *ds->regression);
    else
      fit->objective = std::make_shared<penlik::ErmObjective>(loss, *ds->regression,
                                                              options.hinge_delta);
    *out = fit.release();
  });
}

int64_t penlik_fit_dim(const penlik_fit* fit) { return fit->result.beta.size(); }

penlik_status penlik_fit_coefficients(const penlik_fit* fit, double* out) {
  return guarded(
      [&] { Eigen::Map<Eigen::VectorXd>(out, fit->result.beta.size()) = fit->result.beta; });
}

int64_t penlik_fit_n_active(const penlik_fit* fit) {
  return static_cast<int64_t>(fit->result.active_set.size());
}

penlik_status penlik_fit_active_set(const penlik_fit* fit, int64_t* out) {
  return guarded([&] {
    for (std::size_t i = 0; i < fit->result.active_set.size(); ++i)
      out[i] = static_cast<int64_t>(fit->result.active_set[i]);
  });
}

int penlik_fit_converged(const penlik_fit* fit) { return fit->result.converged ? 1 : 0; }

int penlik_fit_iterations(const penlik_fit* fit) { return fit->result.iterations; }

double penlik_fit_objective(const penlik_fit* fit) { return fit->result.objective; }

penlik_status penlik_fit_sigma_lambda(const penlik_fit* fit, double* out) {
  return guarded([&] {
    Eigen::Map<Eigen::VectorXd>(out, fit->result.sigma_lambda.size()) = fit->result.sigma_lambda;
  });
}

penlik_status penlik_fit_stationarity_max(const penlik_fit* fit, double* out) {
  return guarded([&] {
    *out = penlik::stationarity_max_norm(fit->result, *fit->objective, fit->penalties);
  });
}

penlik_status penlik_fit_effective_params(const penlik_fit* fit, double* out) {
  return guarded([&] { *out = penlik::effective_params(fit->result, *fit->objective); });
}

penlik_status penlik_fit_gcv(const penlik_fit* fit, double* out) {
  return guarded([&] { *out = penlik::gcv_score(fit->result, *fit->objective); });
}

penlik_status penlik_fit_sandwich(const penlik_fit* fit, double* cov) {
  return guarded([&] {
    const Eigen::MatrixXd c = penlik::sandwich_cov(fit->result, *fit->objective, fit->penalties);
    for (Eigen::Index i = 0; i < c.rows(); ++i)
      for (Eigen::Index j = 0; j < c.cols(); ++j) cov[i * c.cols() + j] = c(i, j);
  });
}

penlik_status penlik_fit_exact_hinge_objective(const penlik_fit* fit, double* out) {
  return guarded([&] {
    if (std::isnan(fit->exact_hinge))
      throw penlik::InvalidArgument("fit does not carry an exact hinge objective");
    *out = fit->exact_hinge;
  });
}

penlik_status penlik_fit_to_json(const penlik_fit* fit, char** out) {
  return guarded([&] { *out = dup_string(fit_json(*fit).dump(2)); });
}

void penlik_fit_free(penlik_fit* fit) { delete fit; }

penlik_status penlik_tune(const penlik_dataset* ds, int family, int penalty_kind, double shape,
                          const double* penalty_factor, const double* grid, int64_t grid_len,
                          int grid_size, penlik_tuning** out) {
  return guarded([&] {
    std::shared_ptr<penlik::PenalizedObjective> objective;
    Eigen::Index d = 0;
    if (family < 0) {
      if (!ds->survival) throw penlik::InvalidArgument("Cox tuning needs a survival dataset");
      objective = std::make_shared<penlik::CoxObjective>(*ds->survival);
      d = ds->survival->d();
    } else {
      if (!ds->regression) throw penlik::InvalidArgument("GLM tuning needs a regression dataset");
      objective = std::make_shared<penlik::GlmObjective>(
          penlik::GlmModel{family_from(family), 1.0}, *ds->regression);
      d = ds->regression->d();
    }
    penlik::TuneOptions options;
    options.kind = static_cast<penlik::PenaltyKind>(penalty_kind);
    options.shape = shape == 0.0 ? penlik::default_shape(options.kind) : shape;
    if (grid != nullptr && grid_len > 0)
      options.lambda_grid.assign(grid, grid + grid_len);
    if (grid_size > 0) options.grid_size = grid_size;
    if (penalty_factor != nullptr)
      options.penalty_factor = Eigen::Map<const Eigen::VectorXd>(penalty_factor, d);
    auto* tuning = new penlik_tuning;
    try {
      tuning->result = penlik::gcv_select(*objective, options);
    } catch (...) {
      delete tuning;
      throw;
    }
    tuning->objective = std::move(objective);
    *out = tuning;
  });
}

int64_t penlik_tuning_grid_len(const penlik_tuning* t) {
  return static_cast<int64_t>(t->result.lambda_grid.size());
}

penlik_status penlik_tuning_grid(const penlik_tuning* t, double* lambdas, double* scores,
                                 double* eff_params) {
  return guarded([&] {
    for (std::size_t i = 0; i < t->result.lambda_grid.size(); ++i) {
      if (lambdas != nullptr) lambdas[i] = t->result.lambda_grid[i];
      if (scores != nullptr) scores[i] = t->result.gcv_scores[i];
      if (eff_params != nullptr) eff_params[i] = t->result.effective_params[i];
    }
  });
}

double penlik_tuning_chosen_lambda(const penlik_tuning* t) { return t->result.chosen_lambda; }

int64_t penlik_tuning_chosen_index(const penlik_tuning* t) {
  return static_cast<int64_t>(t->result.chosen_index);
}

penlik_status penlik_tuning_per_coordinate_lambda(const penlik_tuning* t, double* out) {
  return guarded([&] {
    Eigen::Map<Eigen::VectorXd>(out, t->result.per_coordinate_lambda.size()) =
        t->result.per_coordinate_lambda;
  });
}

penlik_status penlik_tuning_fit(const penlik_tuning* t, penlik_fit** out) {
  return guarded([&] {
    auto* fit = new penlik_fit;
    fit->objective = t->objective;
    fit->penalties = t->result.penalties_at_chosen;
    fit->result = t->result.fit_at_chosen;
    *out = fit;
  });
}

penlik_status penlik_tuning_to_json(const penlik_tuning* t, char** out) {
  return guarded([&] {
    Json j;
    j["lambda_grid"] = t->result.lambda_grid;
    j["gcv_scores"] = t->result.gcv_scores;
    j["effective_params"] = t->result.effective_params;
    j["chosen_lambda"] = t->result.chosen_lambda;
    j["chosen_index"] = t->result.chosen_index;
    j["per_coordinate_lambda"] = vector_json(t->result.per_coordinate_lambda);
    j["se_scale"] = vector_json(t->result.se_scale);
    penlik_fit tmp;
    tmp.objective = t->objective;
    tmp.penalties = t->result.penalties_at_chosen;
    tmp.result = t->result.fit_at_chosen;
    j["fit"] = fit_json(tmp);
    *out = dup_string(j.dump(2));
  });
}

void penlik_tuning_free(penlik_tuning* t) { delete t; }

penlik_status penlik_cov_cholesky(const double* w, int64_t n, int64_t d, int penalty_kind,
                                  double shape, int use_gcv, double fixed_lambda,
                                  penlik_chol_cov** out) {
  return guarded([&] {
    RowMajorMap wm(w, n, d);
    penlik::CholeskyOptions options;
    options.kind = static_cast<penlik::PenaltyKind>(penalty_kind);
    options.shape = shape == 0.0 ? penlik::default_shape(options.kind) : shape;
    options.use_gcv = use_gcv != 0;
    options.fixed_lambda = fixed_lambda;
    auto* c = new penlik_chol_cov;
    try {
      c->cov = penlik::cholesky_select(Eigen::MatrixXd(wm), options);
    } catch (...) {
      delete c;
      throw;
    }
    *out = c;
  });
}

int64_t penlik_chol_cov_dim(const penlik_chol_cov* c) { return c->cov.phi.rows(); }

penlik_status penlik_chol_cov_get(const penlik_chol_cov* c, double* phi, double* d_diag,
                                  double* sigma, double* precision) {
  return guarded([&] {
    const Eigen::Index d = c->cov.phi.rows();
    for (Eigen::Index i = 0; i < d; ++i) {
      if (d_diag != nullptr) d_diag[i] = c->cov.d_diag[i];
      for (Eigen::Index j = 0; j < d; ++j) {
        if (phi != nullptr) phi[i * d + j] = c->cov.phi(i, j);
        if (sigma != nullptr) sigma[i * d + j] = c->cov.sigma(i, j);
        if (precision != nullptr) precision[i * d + j] = c->cov.precision(i, j);
      }
    }
  });
}

penlik_status penlik_chol_cov_to_json(const penlik_chol_cov* c, char** out) {
  return guarded([&] {
    Json j;
    j["phi"] = matrix_json(c->cov.phi);
    j["d_diag"] = vector_json(c->cov.d_diag);
    j["sigma"] = matrix_json(c->cov.sigma);
    j["precision"] = matrix_json(c->cov.precision);
    Json order = Json::array();
    for (auto idx : c->cov.column_order) order.push_back(static_cast<int64_t>(idx));
    j["column_order"] = order;
    j["row_lambdas"] = c->cov.row_lambdas;
    *out = dup_string(j.dump(2));
  });
}

void penlik_chol_cov_free(penlik_chol_cov* c) { delete c; }

penlik_status penlik_cov_factor(const double* returns, int64_t n, int64_t d, const double* f,
                                int64_t k, penlik_factor_cov** out) {
  return guarded([&] {
    RowMajorMap ym(returns, n, d);
    RowMajorMap fm(f, n, k);
    auto* c = new penlik_factor_cov;
    try {
      c->cov = penlik::factor_cov(Eigen::MatrixXd(ym), Eigen::MatrixXd(fm));
    } catch (...) {
      delete c;
      throw;
    }
    *out = c;
  });
}

penlik_status penlik_factor_cov_get(const penlik_factor_cov* c, double* loadings, double* cov_f,
                                    double* sigma0, double* sigma) {
  return guarded([&] {
    const Eigen::Index d = c->cov.loadings.rows();
    const Eigen::Index k = c->cov.loadings.cols();
    for (Eigen::Index i = 0; i < d; ++i) {
      if (sigma0 != nullptr) sigma0[i] = c->cov.sigma0[i];
      if (loadings != nullptr)
        for (Eigen::Index j = 0; j < k; ++j) loadings[i * k + j] = c->cov.loadings(i, j);
      if (sigma != nullptr)
        for (Eigen::Index j = 0; j < d; ++j) sigma[i * d + j] = c->cov.sigma(i, j);
    }
    if (cov_f != nullptr)
      for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) cov_f[i * k + j] = c->cov.cov_f(i, j);
  });
}

penlik_status penlik_factor_cov_to_json(const penlik_factor_cov* c, char** out) {
  return guarded([&] {
    Json j;
    j["loadings"] = matrix_json(c->cov.loadings);
    j["cov_f"] = matrix_json(c->cov.cov_f);
    j["sigma0"] = vector_json(c->cov.sigma0);
    j["sigma"] = matrix_json(c->cov.sigma);
    *out = dup_string(j.dump(2));
  });
}

void penlik_factor_cov_free(penlik_factor_cov* c) { delete c; }

penlik_status penlik_compare_estimators_json(const double* sigma_true, int64_t d,
                                             const double* const* estimates, int64_t n_estimates,
                                             const double* xi, char** out) {
  return guarded([&] {
    RowMajorMap st(sigma_true, d, d);
    std::vector<Eigen::MatrixXd> ests;
    for (int64_t i = 0; i < n_estimates; ++i)
      ests.emplace_back(RowMajorMap(estimates[i], d, d));
    Eigen::Map<const Eigen::VectorXd> xiv(xi, d);
    const auto cmp = penlik::compare_estimators(Eigen::MatrixXd(st), ests, Eigen::VectorXd(xiv));
    Json arr = Json::array();
    for (const auto& c : cmp) {
      Json j;
      j["max_eigenvalue_dev"] = c.max_eigenvalue_dev;
      j["portfolio_risk_err"] = c.portfolio_risk_err;
      j["precision_metric"] = c.precision_metric;
      j["inverse_frobenius"] = c.inverse_frobenius;
      arr.push_back(std::move(j));
    }
    *out = dup_string(arr.dump(2));
  });
}

penlik_status penlik_qloss_value(int loss_kind, double c, double y, double m_hat, double* out) {
  return guarded([&] {
    if (loss_kind < 0 || loss_kind > 3) throw penlik::InvalidArgument("invalid loss kind");
    const penlik::QLoss loss =
        penlik::make_q_loss(static_cast<penlik::QLossKind>(loss_kind), c == 0.0 ? 1.0 : c);
    *out = loss(y, m_hat);
  });
}

penlik_status penlik_risk_gap(int loss_kind, const double* beta_hat, const double* beta_star,
                              const double* beta_true, int64_t d, double sigma, double ar_rho,
                              int64_t mc_n, uint64_t seed, double* gap, double* std_error) {
  return guarded([&] {
    if (loss_kind < 0 || loss_kind > 3) throw penlik::InvalidArgument("invalid loss kind");
    penlik::LinearGenerator gen;
    gen.beta = Eigen::Map<const Eigen::VectorXd>(beta_true, d);
    gen.sigma = sigma;
    gen.ar_rho = ar_rho;
    const auto est = penlik::empirical_risk_gap(
        Eigen::Map<const Eigen::VectorXd>(beta_hat, d),
        Eigen::Map<const Eigen::VectorXd>(beta_star, d),
        static_cast<penlik::QLossKind>(loss_kind), gen, static_cast<int>(mc_n), seed);
    if (gap != nullptr) *gap = est.gap;
    if (std_error != nullptr) *std_error = est.std_error;
  });
}

penlik_status penlik_best_subset(const penlik_dataset* ds, double lambda, int max_d,
                                 int64_t* subset, int64_t* subset_len, double* beta) {
  return guarded([&] {
    if (!ds->regression) throw penlik::InvalidArgument("best_subset needs a regression dataset");
    const auto fit = penlik::best_subset_oracle(*ds->regression, lambda,
                                                max_d > 0 ? max_d : 15);
    *subset_len = static_cast<int64_t>(fit.subset.size());
    for (std::size_t i = 0; i < fit.subset.size(); ++i)
      subset[i] = static_cast<int64_t>(fit.subset[i]);
    if (beta != nullptr)
      Eigen::Map<Eigen::VectorXd>(beta, fit.beta.size()) = fit.beta;
  });
}

penlik_status penlik_classical_criteria_json(const penlik_dataset* ds, double lambda, int max_d,
                                             char** out) {
  return guarded([&] {
    if (!ds->regression)
      throw penlik::InvalidArgument("classical_criteria needs a regression dataset");
    const Eigen::Index d = ds->regression->d();
    if (d > (max_d > 0 ? max_d : 15))
      throw penlik::InvalidArgument("classical_criteria: too many columns to enumerate");
    std::vector<std::vector<Eigen::Index>> subsets;
    for (std::uint64_t mask = 0; mask < (1ULL << d); ++mask) {
      std::vector<Eigen::Index> s;
      for (Eigen::Index j = 0; j < d; ++j)
        if (mask & (1ULL << j)) s.push_back(j);
      subsets.push_back(std::move(s));
    }
    const auto rows = penlik::classical_criteria(*ds->regression, subsets, lambda);
    Json arr = Json::array();
    for (const auto& r : rows) {
      Json j;
      Json cols = Json::array();
      for (auto idx : r.subset) cols.push_back(static_cast<int64_t>(idx));
      j["subset"] = cols;
      j["rss"] = r.rss;
      j["adjusted_r2"] = r.adjusted_r2;
      j["gcv"] = r.gcv;
      j["pls"] = r.pls;
      arr.push_back(std::move(j));
    }
    *out = dup_string(arr.dump(2));
  });
}

penlik_status penlik_experiment_run(const char* config_json, char** report_json) {
  return guarded([&] {
    const Json cfg = Json::parse(config_json);
    *report_json = dup_string(penlik::run_experiment(cfg).dump(2));
  });
}

penlik_status penlik_generate(const char* config_json, const char* data_path,
                              char** report_json) {
  return guarded([&] {
    const Json cfg = Json::parse(config_json);
    *report_json = dup_string(penlik::generate_to_files(cfg, data_path).dump(2));
  });
}

}  // extern "C"
