// penlik command line: fit / tune / cov / classify / simulate / oracle-subset
// / threshold / experiment. Talks to the library strictly through the C API;
// every subcommand writes a JSON report (stdout or --out) and exits nonzero
// with a machine-readable error object on failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "penlik.h"

namespace {

using Json = nlohmann::ordered_json;

struct CliError : std::runtime_error {
  int code;
  CliError(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

void check(penlik_status st, const std::string& context) {
  if (st != PENLIK_OK)
    throw CliError(static_cast<int>(st), context + ": " + penlik_last_error());
}

std::string take_string(char* s) {
  std::string out = s != nullptr ? s : "";
  penlik_string_free(s);
  return out;
}

void emit(const Json& report, const std::string& out_path) {
  const std::string text = report.dump(2) + "\n";
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw CliError(PENLIK_ERR_IO, "cannot open output file " + out_path);
  f << text;
}

Json load_config(const std::string& path) {
  if (path.empty()) return Json::object();
  std::ifstream f(path);
  if (!f) throw CliError(PENLIK_ERR_IO, "cannot open config file " + path);
  Json cfg;
  f >> cfg;
  if (!cfg.is_object()) throw CliError(PENLIK_ERR_INVALID_ARGUMENT, "config must be an object");
  return cfg;
}

int penalty_code(const std::string& name) {
  if (name == "hard") return PENLIK_PENALTY_HARD;
  if (name == "entropy" || name == "l0") return PENLIK_PENALTY_ENTROPY;
  if (name == "l1" || name == "lasso") return PENLIK_PENALTY_L1;
  if (name == "l2" || name == "ridge") return PENLIK_PENALTY_L2;
  if (name == "bridge") return PENLIK_PENALTY_BRIDGE;
  if (name == "scad") return PENLIK_PENALTY_SCAD;
  throw CliError(PENLIK_ERR_INVALID_ARGUMENT, "unknown penalty: " + name);
}

int family_code(const std::string& name) {
  if (name == "gaussian") return PENLIK_FAMILY_GAUSSIAN;
  if (name == "logistic") return PENLIK_FAMILY_LOGISTIC;
  if (name == "poisson") return PENLIK_FAMILY_POISSON;
  if (name == "cox") return -1;
  throw CliError(PENLIK_ERR_INVALID_ARGUMENT, "unknown family: " + name);
}

int loss_code(const std::string& name) {
  if (name == "misclassification") return PENLIK_LOSS_MISCLASSIFICATION;
  if (name == "hinge" || name == "smoothed-hinge") return PENLIK_LOSS_HINGE;
  if (name == "exponential") return PENLIK_LOSS_EXPONENTIAL;
  if (name == "quadratic") return PENLIK_LOSS_QUADRATIC;
  throw CliError(PENLIK_ERR_INVALID_ARGUMENT, "unknown loss: " + name);
}

struct DatasetHandle {
  penlik_dataset* ptr = nullptr;
  ~DatasetHandle() { penlik_dataset_free(ptr); }
};

struct FitHandle {
  penlik_fit* ptr = nullptr;
  ~FitHandle() { penlik_fit_free(ptr); }
};

struct TuningHandle {
  penlik_tuning* ptr = nullptr;
  ~TuningHandle() { penlik_tuning_free(ptr); }
};

struct MatrixBuffer {
  double* data = nullptr;
  int64_t n = 0, d = 0;
  ~MatrixBuffer() { penlik_buffer_free(data); }
};

MatrixBuffer read_matrix(const std::string& path) {
  MatrixBuffer m;
  check(penlik_read_matrix_csv(path.c_str(), &m.data, &m.n, &m.d), "reading " + path);
  return m;
}

Json fit_report(penlik_fit* fit) {
  char* s = nullptr;
  check(penlik_fit_to_json(fit, &s), "serializing fit");
  Json j = Json::parse(take_string(s));
  double e = 0.0;
  if (penlik_fit_effective_params(fit, &e) == PENLIK_OK) j["effective_params"] = e;
  double gcv = 0.0;
  if (penlik_fit_gcv(fit, &gcv) == PENLIK_OK) j["gcv"] = gcv;
  const int64_t k = penlik_fit_n_active(fit);
  if (k > 0) {
    std::vector<double> cov(static_cast<std::size_t>(k * k));
    if (penlik_fit_sandwich(fit, cov.data()) == PENLIK_OK) {
      Json rows = Json::array();
      for (int64_t i = 0; i < k; ++i) {
        Json row = Json::array();
        for (int64_t c = 0; c < k; ++c) row.push_back(cov[static_cast<std::size_t>(i * k + c)]);
        rows.push_back(std::move(row));
      }
      j["sandwich_cov"] = rows;
    }
  }
  return j;
}

// Flag-or-config lookup: a flag given on the command line wins, then the
// config file, then the built-in default.
template <typename T>
T pick(const CLI::Option* opt, const T& flag_value, const Json& cfg, const char* key,
       const T& fallback) {
  if (opt != nullptr && opt->count() > 0) return flag_value;
  if (cfg.contains(key)) return cfg.at(key).get<T>();
  return fallback;
}

std::vector<double> ones_with_zeros(int64_t d, const std::vector<int64_t>& zero_at) {
  std::vector<double> v(static_cast<std::size_t>(d), 1.0);
  for (int64_t idx : zero_at) {
    if (idx < 0 || idx >= d)
      throw CliError(PENLIK_ERR_INVALID_ARGUMENT, "unpenalized index out of range");
    v[static_cast<std::size_t>(idx)] = 0.0;
  }
  return v;
}

Json tuning_report(penlik_tuning* tuning) {
  char* s = nullptr;
  check(penlik_tuning_to_json(tuning, &s), "serializing tuning result");
  return Json::parse(take_string(s));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"penalized likelihood estimation toolkit"};
  app.require_subcommand(1);

  // Shared flags, one set per subcommand.
  struct Common {
    std::string out;
    std::string config;
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
  };
  auto add_common = [](CLI::App* cmd, Common& c) {
    cmd->add_option("--out", c.out, "output JSON path (default stdout)");
    cmd->add_option("--config", c.config, "JSON config file; flags override its fields");
    c.seed_opt = cmd->add_option("--seed", c.seed, "random seed");
  };

  // fit ----------------------------------------------------------------
  auto* fit_cmd = app.add_subcommand("fit", "penalized GLM / Cox fit");
  Common fit_common;
  std::string fit_data, fit_family = "gaussian", fit_penalty = "scad";
  double fit_lambda = -1.0, fit_shape = 0.0;
  bool fit_gcv = false;
  int fit_grid_size = 50;
  std::vector<int64_t> fit_unpenalized;
  fit_cmd->add_option("--data", fit_data, "CSV: y,x1..xd (time,status,x1.. for cox)");
  fit_cmd->add_option("--family", fit_family, "gaussian|logistic|poisson|cox");
  fit_cmd->add_option("--penalty", fit_penalty, "hard|entropy|l1|l2|bridge|scad");
  auto* fit_lambda_opt = fit_cmd->add_option("--lambda", fit_lambda, "penalty level");
  fit_cmd->add_flag("--gcv", fit_gcv, "select lambda by GCV");
  fit_cmd->add_option("--grid-size", fit_grid_size, "GCV grid size");
  fit_cmd->add_option("--shape", fit_shape, "SCAD a / bridge q / l2 coefficient");
  fit_cmd->add_option("--unpenalized", fit_unpenalized, "0-based coordinates left unpenalized");
  add_common(fit_cmd, fit_common);

  // tune ---------------------------------------------------------------
  auto* tune_cmd = app.add_subcommand("tune", "GCV path over a lambda grid");
  Common tune_common;
  std::string tune_data, tune_family = "gaussian", tune_penalty = "scad";
  double tune_shape = 0.0;
  int tune_grid_size = 50;
  std::vector<double> tune_grid;
  std::vector<int64_t> tune_unpenalized;
  tune_cmd->add_option("--data", tune_data, "CSV: y,x1..xd (time,status,x1.. for cox)");
  tune_cmd->add_option("--family", tune_family, "gaussian|logistic|poisson|cox");
  tune_cmd->add_option("--penalty", tune_penalty, "penalty kind");
  tune_cmd->add_option("--shape", tune_shape, "penalty shape parameter");
  tune_cmd->add_option("--grid", tune_grid, "explicit base-lambda grid");
  tune_cmd->add_option("--grid-size", tune_grid_size, "auto grid size");
  tune_cmd->add_option("--unpenalized", tune_unpenalized, "0-based coordinates left unpenalized");
  add_common(tune_cmd, tune_common);

  // cov ------------------------------------------------------------------
  auto* cov_cmd = app.add_subcommand("cov", "sparse covariance estimation");
  cov_cmd->require_subcommand(1);
  auto* chol_cmd = cov_cmd->add_subcommand("chol", "modified Cholesky with per-row PLS");
  Common chol_common;
  std::string chol_data, chol_penalty = "scad";
  double chol_lambda = 0.0, chol_shape = 0.0;
  bool chol_no_gcv = false;
  chol_cmd->add_option("--data", chol_data, "CSV sample matrix (header row)");
  chol_cmd->add_option("--penalty", chol_penalty, "penalty kind");
  chol_cmd->add_option("--shape", chol_shape, "penalty shape parameter");
  chol_cmd->add_flag("--no-gcv", chol_no_gcv, "fixed lambda instead of per-row GCV");
  chol_cmd->add_option("--lambda", chol_lambda, "fixed lambda (with --no-gcv; 0 = OLS rows)");
  add_common(chol_cmd, chol_common);

  auto* factor_cmd = cov_cmd->add_subcommand("factor", "K-factor covariance");
  Common factor_common;
  std::string factor_returns, factor_factors;
  factor_cmd->add_option("--returns", factor_returns, "CSV of excess returns (n x d)");
  factor_cmd->add_option("--factors", factor_factors, "CSV of factors (n x K)");
  add_common(factor_cmd, factor_common);

  // classify -------------------------------------------------------------
  auto* classify_cmd = app.add_subcommand("classify", "penalized empirical risk minimization");
  Common classify_common;
  std::string classify_data, classify_loss = "smoothed-hinge", classify_penalty = "l1";
  double classify_lambda = 0.0, classify_delta = 1e-3, classify_shape = 0.0;
  bool classify_intercept = false;
  classify_cmd->add_option("--data", classify_data, "CSV: y,x1..xd with y in {-1,+1}");
  classify_cmd->add_option("--loss", classify_loss,
                           "smoothed-hinge|quadratic|exponential");
  classify_cmd->add_option("--penalty", classify_penalty, "penalty kind");
  classify_cmd->add_option("--lambda", classify_lambda, "penalty level");
  classify_cmd->add_option("--shape", classify_shape, "penalty shape parameter");
  classify_cmd->add_option("--delta", classify_delta, "hinge smoothing width");
  classify_cmd->add_flag("--intercept", classify_intercept,
                         "treat column 1 as an unpenalized intercept");
  add_common(classify_cmd, classify_common);

  // simulate ---------------------------------------------------------------
  auto* sim_cmd = app.add_subcommand("simulate", "generate reproducible datasets");
  Common sim_common;
  std::string sim_kind = "linear", sim_data_out;
  int sim_n = 100, sim_d = 4, sim_k = 3, sim_band = 1;
  double sim_sigma = 1.0, sim_censor = 0.5, sim_rho = 0.0;
  std::vector<double> sim_beta, sim_band_coefs;
  auto* sim_kind_opt = sim_cmd->add_option(
      "--kind", sim_kind, "linear|logistic|poisson|survival|factor|cholesky_ar|orthonormal");
  auto* sim_n_opt = sim_cmd->add_option("--n", sim_n, "observations");
  auto* sim_d_opt = sim_cmd->add_option("--d", sim_d, "dimension");
  auto* sim_beta_opt = sim_cmd->add_option("--beta", sim_beta, "true coefficients");
  auto* sim_sigma_opt = sim_cmd->add_option("--sigma", sim_sigma, "noise scale");
  auto* sim_censor_opt = sim_cmd->add_option("--censor-rate", sim_censor, "censoring rate");
  auto* sim_rho_opt = sim_cmd->add_option("--ar-rho", sim_rho, "AR(rho) predictor correlation");
  auto* sim_k_opt = sim_cmd->add_option("--k", sim_k, "number of factors");
  auto* sim_band_opt = sim_cmd->add_option("--band", sim_band, "AR band width");
  auto* sim_band_coefs_opt =
      sim_cmd->add_option("--band-coefs", sim_band_coefs, "AR band coefficients");
  sim_cmd->add_option("--data-out", sim_data_out, "CSV path for the generated sample");
  add_common(sim_cmd, sim_common);

  // oracle-subset -----------------------------------------------------------
  auto* subset_cmd = app.add_subcommand("oracle-subset", "exhaustive best-subset oracle");
  Common subset_common;
  std::string subset_data;
  double subset_lambda = 0.0;
  int subset_max_d = 15;
  subset_cmd->add_option("--data", subset_data, "CSV: y,x1..xd");
  subset_cmd->add_option("--lambda", subset_lambda, "entropy penalty level");
  subset_cmd->add_option("--max-d", subset_max_d, "exhaustive-search limit");
  add_common(subset_cmd, subset_common);

  // threshold -----------------------------------------------------------
  auto* thr_cmd = app.add_subcommand("threshold", "scalar thresholding rules");
  Common thr_common;
  std::string thr_penalty = "scad";
  double thr_lambda = 1.0, thr_shape = 0.0, thr_sigma = 1.0;
  int64_t thr_n = 0;
  bool thr_universal = false;
  std::vector<double> thr_z;
  thr_cmd->add_option("--penalty", thr_penalty, "penalty kind");
  thr_cmd->add_option("--lambda", thr_lambda, "penalty level");
  thr_cmd->add_option("--shape", thr_shape, "penalty shape parameter");
  thr_cmd->add_option("--z", thr_z, "observations to threshold")->required();
  thr_cmd->add_flag("--universal", thr_universal, "use lambda = sigma sqrt(2 log n / n)");
  thr_cmd->add_option("--n", thr_n, "sample size for the universal threshold");
  thr_cmd->add_option("--sigma", thr_sigma, "noise scale for the universal threshold");
  add_common(thr_cmd, thr_common);

  // experiment -----------------------------------------------------------
  auto* exp_cmd = app.add_subcommand("experiment", "seeded Monte Carlo experiment runners");
  Common exp_common;
  std::string exp_kind;
  int exp_replicates = 0;
  auto* exp_kind_opt = exp_cmd->add_option(
      "--kind", exp_kind,
      "oracle|sandwich|cox_oracle|cholesky|factor_compare|persistence|universal_threshold|"
      "gcv_null|subset_equivalence|orthonormal_equivalence");
  auto* exp_rep_opt = exp_cmd->add_option("--replicates", exp_replicates, "replicate count");
  add_common(exp_cmd, exp_common);

  try {
    app.parse(argc, argv);

    if (*fit_cmd) {
      const Json cfg = load_config(fit_common.config);
      const std::string data = fit_data.empty() && cfg.contains("data")
                                   ? cfg.at("data").get<std::string>()
                                   : fit_data;
      if (data.empty()) throw CliError(PENLIK_ERR_INVALID_ARGUMENT, "fit: --data is required");
      const int family = family_code(fit_family);
      DatasetHandle ds;
      check(penlik_dataset_read_csv(data.c_str(), family < 0 ? 1 : 0, &ds.ptr),
            "reading " + data);
      const int64_t d = penlik_dataset_d(ds.ptr);
      const int penalty = penalty_code(fit_penalty);
      Json report;
      report["command"] = "fit";
      report["data"] = data;
      report["family"] = fit_family;
      report["penalty"] = fit_penalty;
      if (fit_gcv) {
        const auto factor = ones_with_zeros(d, fit_unpenalized);
        TuningHandle tuning;
        check(penlik_tune(ds.ptr, family, penalty, fit_shape, factor.data(), nullptr, 0,
                          fit_grid_size, &tuning.ptr),
              "GCV tuning");
        report["tuning"] = tuning_report(tuning.ptr);
        FitHandle best;
        check(penlik_tuning_fit(tuning.ptr, &best.ptr), "extracting chosen fit");
        report["result"] = fit_report(best.ptr);
      } else {
        if (fit_lambda_opt->count() == 0 && !cfg.contains("lambda"))
          throw CliError(PENLIK_ERR_INVALID_ARGUMENT, "fit: need --lambda or --gcv");
        const double lambda =
            pick(fit_lambda_opt, fit_lambda, cfg, "lambda", fit_lambda);
        std::vector<double> lambdas(static_cast<std::size_t>(d), lambda);
        for (int64_t idx : fit_unpenalized) {
          if (idx < 0 || idx >= d)
            throw CliError(PENLIK_ERR_INVALID_ARGUMENT, "unpenalized index out of range");
          lambdas[static_cast<std::size_t>(idx)] = 0.0;
        }
        report["lambda"] = lambda;
        FitHandle fit;
        if (family < 0)
          check(penlik_fit_cox(ds.ptr, penalty, fit_shape, lambdas.data(), nullptr, &fit.ptr),
                "Cox fit");
        else
          check(penlik_fit_glm(ds.ptr, family, penalty, fit_shape, lambdas.data(), nullptr,
                               &fit.ptr),
                "GLM fit");
        report["result"] = fit_report(fit.ptr);
      }
      emit(report, fit_common.out);
    } else if (*tune_cmd) {
      const Json cfg = load_config(tune_common.config);
      const std::string data = tune_data.empty() && cfg.contains("data")
                                   ? cfg.at("data").get<std::string>()
                                   : tune_data;
      if (data.empty()) throw CliError(PENLIK_ERR_INVALID_ARGUMENT, "tune: --data is required");
      const int family = family_code(tune_family);
      DatasetHandle ds;
      check(penlik_dataset_read_csv(data.c_str(), family < 0 ? 1 : 0, &ds.ptr),
            "reading " + data);
      const auto factor = ones_with_zeros(penlik_dataset_d(ds.ptr), tune_unpenalized);
      TuningHandle tuning;
      check(penlik_tune(ds.ptr, family, penalty_code(tune_penalty), tune_shape, factor.data(),
                        tune_grid.empty() ? nullptr : tune_grid.data(),
                        static_cast<int64_t>(tune_grid.size()), tune_grid_size, &tuning.ptr),
            "GCV tuning");
      Json report;
      report["command"] = "tune";
      report["data"] = data;
      report["family"] = tune_family;
      report["penalty"] = tune_penalty;
      report["tuning"] = tuning_report(tuning.ptr);
      emit(report, tune_common.out);
    } else if (*chol_cmd) {
      load_config(chol_common.config);
      if (chol_data.empty())
        throw CliError(PENLIK_ERR_INVALID_ARGUMENT, "cov chol: --data is required");
      const MatrixBuffer w = read_matrix(chol_data);
      penlik_chol_cov* cov = nullptr;
      check(penlik_cov_cholesky(w.data, w.n, w.d, penalty_code(chol_penalty), chol_shape,
                                chol_no_gcv ? 0 : 1, chol_lambda, &cov),
            "Cholesky covariance selection");
      char* s = nullptr;
      const penlik_status st = penlik_chol_cov_to_json(cov, &s);
      penlik_chol_cov_free(cov);
      check(st, "serializing covariance");
      Json report;
      report["command"] = "cov chol";
      report["data"] = chol_data;
      report["penalty"] = chol_penalty;
      report["estimate"] = Json::parse(take_string(s));
      emit(report, chol_common.out);
    } else if (*factor_cmd) {
      load_config(factor_common.config);
      if (factor_returns.empty() || factor_factors.empty())
        throw CliError(PENLIK_ERR_INVALID_ARGUMENT,
                       "cov factor: --returns and --factors are required");
      const MatrixBuffer y = read_matrix(factor_returns);
      const MatrixBuffer f = read_matrix(factor_factors);
      if (f.n != y.n)
        throw CliError(PENLIK_ERR_INVALID_ARGUMENT, "returns/factors row mismatch");
      penlik_factor_cov* cov = nullptr;
      check(penlik_cov_factor(y.data, y.n, y.d, f.data, f.d, &cov), "factor covariance");
      char* s = nullptr;
      const penlik_status st = penlik_factor_cov_to_json(cov, &s);
      penlik_factor_cov_free(cov);
      check(st, "serializing covariance");
      Json report;
      report["command"] = "cov factor";
      report["returns"] = factor_returns;
      report["factors"] = factor_factors;
      report["estimate"] = Json::parse(take_string(s));
      emit(report, factor_common.out);
    } else if (*classify_cmd) {
      load_config(classify_common.config);
      if (classify_data.empty())
        throw CliError(PENLIK_ERR_INVALID_ARGUMENT, "classify: --data is required");
      DatasetHandle ds;
      check(penlik_dataset_read_csv(classify_data.c_str(), 0, &ds.ptr),
            "reading " + classify_data);
      const int64_t d = penlik_dataset_d(ds.ptr);
      std::vector<double> lambdas(static_cast<std::size_t>(d), classify_lambda);
      if (classify_intercept) lambdas[0] = 0.0;
      FitHandle fit;
      check(penlik_fit_erm(ds.ptr, loss_code(classify_loss), classify_delta,
                           penalty_code(classify_penalty), classify_shape, lambdas.data(),
                           &fit.ptr),
            "penalized ERM fit");
      Json report;
      report["command"] = "classify";
      report["data"] = classify_data;
      report["loss"] = classify_loss;
      report["penalty"] = classify_penalty;
      report["lambda"] = classify_lambda;
      report["result"] = fit_report(fit.ptr);
      emit(report, classify_common.out);
    } else if (*sim_cmd) {
      Json cfg = load_config(sim_common.config);
      if (sim_kind_opt->count()) cfg["kind"] = sim_kind;
      else if (!cfg.contains("kind")) cfg["kind"] = sim_kind;
      if (sim_common.seed_opt->count()) cfg["seed"] = sim_common.seed;
      if (!cfg.contains("seed"))
        throw CliError(PENLIK_ERR_INVALID_ARGUMENT, "simulate: --seed is required");
      if (sim_n_opt->count() || !cfg.contains("n")) cfg["n"] = sim_n;
      if (sim_d_opt->count() || !cfg.contains("d")) cfg["d"] = sim_d;
      if (sim_beta_opt->count()) cfg["beta"] = sim_beta;
      if (sim_sigma_opt->count()) cfg["sigma"] = sim_sigma;
      if (sim_censor_opt->count()) cfg["censor_rate"] = sim_censor;
      if (sim_rho_opt->count()) cfg["ar_rho"] = sim_rho;
      if (sim_k_opt->count()) cfg["k"] = sim_k;
      if (sim_band_opt->count()) cfg["band"] = sim_band;
      if (sim_band_coefs_opt->count()) cfg["band_coefs"] = sim_band_coefs;
      if (sim_data_out.empty())
        throw CliError(PENLIK_ERR_INVALID_ARGUMENT, "simulate: --data-out is required");
      char* s = nullptr;
      check(penlik_generate(cfg.dump().c_str(), sim_data_out.c_str(), &s), "generating data");
      emit(Json::parse(take_string(s)), sim_common.out);
    } else if (*subset_cmd) {
      load_config(subset_common.config);
      if (subset_data.empty())
        throw CliError(PENLIK_ERR_INVALID_ARGUMENT, "oracle-subset: --data is required");
      DatasetHandle ds;
      check(penlik_dataset_read_csv(subset_data.c_str(), 0, &ds.ptr), "reading " + subset_data);
      const int64_t d = penlik_dataset_d(ds.ptr);
      std::vector<int64_t> subset(static_cast<std::size_t>(d));
      std::vector<double> beta(static_cast<std::size_t>(d));
      int64_t len = 0;
      check(penlik_best_subset(ds.ptr, subset_lambda, subset_max_d, subset.data(), &len,
                               beta.data()),
            "best-subset search");
      Json report;
      report["command"] = "oracle-subset";
      report["data"] = subset_data;
      report["lambda"] = subset_lambda;
      Json sel = Json::array();
      for (int64_t i = 0; i < len; ++i) sel.push_back(subset[static_cast<std::size_t>(i)]);
      report["subset"] = sel;
      report["coefficients"] = beta;
      emit(report, subset_common.out);
    } else if (*thr_cmd) {
      load_config(thr_common.config);
      const int penalty = penalty_code(thr_penalty);
      double lambda = thr_lambda;
      if (thr_universal) {
        if (thr_n < 2)
          throw CliError(PENLIK_ERR_INVALID_ARGUMENT, "threshold: --universal needs --n");
        check(penlik_universal_lambda(thr_n, thr_sigma, &lambda), "universal threshold");
      }
      std::vector<double> out(thr_z.size());
      check(penlik_fit_orthonormal(thr_z.data(), static_cast<int64_t>(thr_z.size()), penalty,
                                   lambda, thr_shape, 0, thr_n > 1 ? thr_n : 2, thr_sigma,
                                   out.data()),
            "thresholding");
      Json report;
      report["command"] = "threshold";
      report["penalty"] = thr_penalty;
      report["lambda"] = lambda;
      report["z"] = thr_z;
      report["thresholded"] = out;
      emit(report, thr_common.out);
    } else if (*exp_cmd) {
      Json cfg = load_config(exp_common.config);
      if (exp_kind_opt->count()) cfg["kind"] = exp_kind;
      if (exp_common.seed_opt->count()) cfg["seed"] = exp_common.seed;
      if (exp_rep_opt->count()) cfg["replicates"] = exp_replicates;
      if (!cfg.contains("kind"))
        throw CliError(PENLIK_ERR_INVALID_ARGUMENT, "experiment: --kind or config kind required");
      if (!cfg.contains("seed"))
        throw CliError(PENLIK_ERR_INVALID_ARGUMENT, "experiment: --seed is required");
      char* s = nullptr;
      check(penlik_experiment_run(cfg.dump().c_str(), &s), "running experiment");
      emit(Json::parse(take_string(s)), exp_common.out);
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const CliError& e) {
    Json err;
    err["error"]["code"] = e.code;
    err["error"]["message"] = e.what();
    std::cerr << err.dump(2) << "\n";
    return e.code == 0 ? 1 : e.code;
  } catch (const std::exception& e) {
    Json err;
    err["error"]["code"] = PENLIK_ERR_INTERNAL;
    err["error"]["message"] = e.what();
    std::cerr << err.dump(2) << "\n";
    return PENLIK_ERR_INTERNAL;
  }
}
