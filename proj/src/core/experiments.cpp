#include "core/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>
#include <vector>

#include "core/covariance.hpp"
#include "core/cox.hpp"
#include "core/errors.hpp"
#include "core/glm.hpp"
#include "core/lqa.hpp"
#include "core/qloss.hpp"
#include "core/rng.hpp"
#include "core/simulate.hpp"
#include "core/subset.hpp"
#include "core/tuning.hpp"

namespace penlik {

namespace {

int thread_count() {
  if (const char* env = std::getenv("PENLIK_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Index-sharded replicate loop; results land in caller-owned slots so the
// aggregation is identical no matter how many workers ran.
template <typename Fn>
void parallel_for(int count, Fn&& fn) {
  const int workers = std::min(thread_count(), std::max(count, 1));
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (;;) {
          const int i = next.fetch_add(1);
          if (i >= count) break;
          fn(i);
        }
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::uint64_t require_seed(const Json& cfg) {
  if (!cfg.contains("seed"))
    throw InvalidArgument("experiment config requires a 'seed' field");
  return cfg.at("seed").get<std::uint64_t>();
}

double num_or(const Json& cfg, const char* key, double fallback) {
  return cfg.contains(key) ? cfg.at(key).get<double>() : fallback;
}

int int_or(const Json& cfg, const char* key, int fallback) {
  return cfg.contains(key) ? cfg.at(key).get<int>() : fallback;
}

std::string str_or(const Json& cfg, const char* key, const std::string& fallback) {
  return cfg.contains(key) ? cfg.at(key).get<std::string>() : fallback;
}

Eigen::VectorXd vector_or(const Json& cfg, const char* key, const Eigen::VectorXd& fallback) {
  if (!cfg.contains(key)) return fallback;
  const auto& arr = cfg.at(key);
  Eigen::VectorXd out(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) out[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  return out;
}

Json to_json(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::vector<Eigen::Index> support_of(const Eigen::VectorXd& beta, double tol = 0.0) {
  std::vector<Eigen::Index> s;
  for (Eigen::Index j = 0; j < beta.size(); ++j)
    if (std::abs(beta[j]) > tol) s.push_back(j);
  return s;
}

TuneOptions tune_options_from(const Json& cfg) {
  TuneOptions tune;
  tune.kind = penalty_kind_from_string(str_or(cfg, "penalty", "scad"));
  tune.shape = num_or(cfg, "shape", default_shape(tune.kind));
  tune.grid_size = int_or(cfg, "grid_size", 50);
  return tune;
}

Json report_skeleton(const char* kind, const Json& cfg, std::uint64_t seed) {
  Json report;
  report["experiment"] = kind;
  report["generator"] = kGeneratorId;
  report["seed"] = seed;
  report["config"] = cfg;
  return report;
}

}  // namespace

Json oracle_experiment(const Json& cfg) {
  const std::uint64_t seed = require_seed(cfg);
  const int n = int_or(cfg, "n", 400);
  const int replicates = int_or(cfg, "replicates", 200);
  const double sigma = num_or(cfg, "sigma", 1.0);
  const double ar_rho = num_or(cfg, "ar_rho", 0.0);
  Eigen::VectorXd beta_true(8);
  beta_true << 3, 1.5, 0, 0, 2, 0, 0, 0;
  beta_true = vector_or(cfg, "beta", beta_true);
  const TuneOptions tune = tune_options_from(cfg);
  const auto true_support = support_of(beta_true);

  std::vector<int> exact(replicates, 0);
  std::vector<double> dist(replicates, 0.0);
  std::vector<double> chosen_lambda(replicates, 0.0);
  parallel_for(replicates, [&](int r) {
    const std::uint64_t rs = derive_seed(seed, static_cast<std::uint64_t>(r));
    Dataset data = generate_linear(n, beta_true, sigma, ar_rho, rs);
    GlmObjective obj(GlmModel{}, std::move(data));
    const TuningResult tuned = gcv_select(obj, tune);
    const Eigen::VectorXd oracle = maximize_on_support(obj, true_support);
    exact[r] = tuned.fit_at_chosen.active_set == true_support ? 1 : 0;
    dist[r] = (tuned.fit_at_chosen.beta - oracle).norm();
    chosen_lambda[r] = tuned.chosen_lambda;
  });

  Json report = report_skeleton("oracle", cfg, seed);
  int hits = 0;
  for (int e : exact) hits += e;
  report["results"]["replicates"] = replicates;
  report["results"]["exact_support_rate"] = static_cast<double>(hits) / replicates;
  report["results"]["median_distance_to_oracle"] = median(dist);
  report["results"]["median_chosen_lambda"] = median(chosen_lambda);
  report["results"]["per_replicate_exact"] = exact;
  return report;
}

Json sandwich_experiment(const Json& cfg) {
  const std::uint64_t seed = require_seed(cfg);
  const int n = int_or(cfg, "n", 800);
  const int replicates = int_or(cfg, "replicates", 500);
  const double sigma = num_or(cfg, "sigma", 1.0);
  Eigen::VectorXd beta_true(8);
  beta_true << 3, 1.5, 0, 0, 2, 0, 0, 0;
  beta_true = vector_or(cfg, "beta", beta_true);
  const TuneOptions tune = tune_options_from(cfg);
  const auto true_support = support_of(beta_true);
  const auto k = static_cast<Eigen::Index>(true_support.size());

  std::vector<int> used(replicates, 0);
  Eigen::MatrixXd coefs(replicates, k);
  Eigen::MatrixXd ses(replicates, k);
  parallel_for(replicates, [&](int r) {
    const std::uint64_t rs = derive_seed(seed, static_cast<std::uint64_t>(r));
    Dataset data = generate_linear(n, beta_true, sigma, 0.0, rs);
    GlmObjective obj(GlmModel{}, std::move(data));
    const TuningResult tuned = gcv_select(obj, tune);
    if (tuned.fit_at_chosen.active_set != true_support) return;
    Eigen::MatrixXd cov;
    try {
      cov = sandwich_cov(tuned.fit_at_chosen, obj, tuned.penalties_at_chosen);
    } catch (const NumericalError&) {
      return;
    }
    used[r] = 1;
    for (Eigen::Index c = 0; c < k; ++c) {
      coefs(r, c) = tuned.fit_at_chosen.beta[true_support[static_cast<std::size_t>(c)]];
      ses(r, c) = std::sqrt(cov(c, c));
    }
  });

  Json report = report_skeleton("sandwich", cfg, seed);
  int m = 0;
  for (int u : used) m += u;
  Json ratios = Json::array(), mc_sds = Json::array(), mean_ses = Json::array();
  double worst = 0.0;
  for (Eigen::Index c = 0; c < k; ++c) {
    double mean = 0.0, mean_se = 0.0;
    for (int r = 0; r < replicates; ++r)
      if (used[r]) {
        mean += coefs(r, c);
        mean_se += ses(r, c);
      }
    mean /= m;
    mean_se /= m;
    double var = 0.0;
    for (int r = 0; r < replicates; ++r)
      if (used[r]) var += (coefs(r, c) - mean) * (coefs(r, c) - mean);
    const double mc_sd = std::sqrt(var / (m - 1));
    const double ratio = mean_se / mc_sd;
    mc_sds.push_back(mc_sd);
    mean_ses.push_back(mean_se);
    ratios.push_back(ratio);
    worst = std::max(worst, std::abs(ratio - 1.0));
  }
  report["results"]["replicates"] = replicates;
  report["results"]["replicates_used"] = m;
  report["results"]["mc_sd"] = mc_sds;
  report["results"]["mean_sandwich_se"] = mean_ses;
  report["results"]["se_over_mc_sd"] = ratios;
  report["results"]["max_relative_gap"] = worst;
  return report;
}

Json cox_oracle_experiment(const Json& cfg) {
  const std::uint64_t seed = require_seed(cfg);
  const int n = int_or(cfg, "n", 300);
  const int replicates = int_or(cfg, "replicates", 200);
  const double censor_rate = num_or(cfg, "censor_rate", 0.7);
  Eigen::VectorXd beta_true(6);
  beta_true << 0.8, 0, 0.6, 0, 0, 0;
  beta_true = vector_or(cfg, "beta", beta_true);
  const TuneOptions tune = tune_options_from(cfg);
  const auto true_support = support_of(beta_true);

  std::vector<int> exact(replicates, 0);
  std::vector<double> censored_frac(replicates, 0.0);
  parallel_for(replicates, [&](int r) {
    const std::uint64_t rs = derive_seed(seed, static_cast<std::uint64_t>(r));
    SurvivalData data = generate_survival(n, beta_true, censor_rate, 0.0, rs);
    censored_frac[r] = 1.0 - static_cast<double>(data.n_failures()) / n;
    CoxObjective obj(std::move(data));
    const TuningResult tuned = gcv_select(obj, tune);
    exact[r] = tuned.fit_at_chosen.active_set == true_support ? 1 : 0;
  });

  Json report = report_skeleton("cox_oracle", cfg, seed);
  int hits = 0;
  for (int e : exact) hits += e;
  report["results"]["replicates"] = replicates;
  report["results"]["exact_support_rate"] = static_cast<double>(hits) / replicates;
  report["results"]["median_censoring_fraction"] = median(censored_frac);
  return report;
}

Json cholesky_experiment(const Json& cfg) {
  const std::uint64_t seed = require_seed(cfg);
  const int n = int_or(cfg, "n", 1000);
  const int d = int_or(cfg, "d", 10);
  const int replicates = int_or(cfg, "replicates", 100);
  const int band = int_or(cfg, "band", 1);
  Eigen::VectorXd coefs = vector_or(cfg, "band_coefs", Eigen::VectorXd::Constant(1, 0.5));
  const CholeskyTruth truth = make_banded_cholesky_truth(d, band, coefs);

  CholeskyOptions options;
  options.kind = penalty_kind_from_string(str_or(cfg, "penalty", "scad"));
  options.shape = num_or(cfg, "shape", default_shape(options.kind));
  options.grid_size = int_or(cfg, "grid_size", 25);

  int off_band_positions = 0;
  for (int t = 1; t < d; ++t)
    for (int j = 0; j < t; ++j)
      if (truth.phi(t, j) == 0.0) ++off_band_positions;
  int band_positions = 0;
  for (int t = 1; t < d; ++t)
    for (int j = 0; j < t; ++j)
      if (truth.phi(t, j) != 0.0) ++band_positions;

  std::vector<double> fp(replicates, 0.0), tp(replicates, 0.0);
  parallel_for(replicates, [&](int r) {
    const std::uint64_t rs = derive_seed(seed, static_cast<std::uint64_t>(r));
    const Eigen::MatrixXd w = generate_cholesky_sample(n, truth, rs);
    const CholeskyCov est = cholesky_select(w, options);
    int false_pos = 0, true_pos = 0;
    for (int t = 1; t < d; ++t)
      for (int j = 0; j < t; ++j) {
        const bool nonzero = est.phi(t, j) != 0.0;
        if (truth.phi(t, j) == 0.0 && nonzero) ++false_pos;
        if (truth.phi(t, j) != 0.0 && nonzero) ++true_pos;
      }
    fp[r] = static_cast<double>(false_pos) / off_band_positions;
    tp[r] = static_cast<double>(true_pos) / band_positions;
  });

  Json report = report_skeleton("cholesky", cfg, seed);
  double fp_mean = 0.0, tp_mean = 0.0;
  for (int r = 0; r < replicates; ++r) {
    fp_mean += fp[r];
    tp_mean += tp[r];
  }
  report["results"]["replicates"] = replicates;
  report["results"]["false_positive_rate"] = fp_mean / replicates;
  report["results"]["true_positive_rate"] = tp_mean / replicates;
  return report;
}

Json factor_compare_experiment(const Json& cfg) {
  const std::uint64_t seed = require_seed(cfg);
  const int n = int_or(cfg, "n", 100);
  const int d = int_or(cfg, "d", 50);
  const int k = int_or(cfg, "k", 3);
  const int replicates = int_or(cfg, "replicates", 100);
  const FactorTruth truth =
      make_factor_truth(d, k, num_or(cfg, "sigma0_lo", 0.2), num_or(cfg, "sigma0_hi", 0.8),
                        derive_seed(seed, 999));
  const Eigen::VectorXd xi = Eigen::VectorXd::Constant(d, 1.0 / d);

  std::vector<int> precision_win(replicates, 0);
  std::vector<double> eig_ratio(replicates, 0.0);
  std::vector<double> prec_factor(replicates, 0.0), prec_sample(replicates, 0.0);
  parallel_for(replicates, [&](int r) {
    const std::uint64_t rs = derive_seed(seed, static_cast<std::uint64_t>(r));
    const FactorDraw draw = generate_factor_returns(n, truth, rs);
    const FactorCov fc = factor_cov(draw.returns, draw.factors);
    const Eigen::MatrixXd sc = sample_covariance(draw.returns);
    const auto cmp = compare_estimators(truth.sigma, {fc.sigma, sc}, xi);
    precision_win[r] = cmp[0].precision_metric < cmp[1].precision_metric ? 1 : 0;
    eig_ratio[r] = cmp[0].max_eigenvalue_dev / cmp[1].max_eigenvalue_dev;
    prec_factor[r] = cmp[0].precision_metric;
    prec_sample[r] = cmp[1].precision_metric;
  });

  Json report = report_skeleton("factor_compare", cfg, seed);
  int wins = 0;
  for (int w : precision_win) wins += w;
  report["results"]["replicates"] = replicates;
  report["results"]["precision_metric_win_rate"] = static_cast<double>(wins) / replicates;
  report["results"]["median_precision_factor"] = median(prec_factor);
  report["results"]["median_precision_sample"] = median(prec_sample);
  report["results"]["median_eigenvalue_dev_ratio"] = median(eig_ratio);
  return report;
}

Json persistence_experiment(const Json& cfg) {
  const std::uint64_t seed = require_seed(cfg);
  const int d = int_or(cfg, "d", 50);
  const int s = int_or(cfg, "s", 5);
  const int n_small = int_or(cfg, "n_small", 250);
  const int n_large = int_or(cfg, "n_large", 1000);
  const int pairs = int_or(cfg, "pairs", 60);
  const int mc_n = int_or(cfg, "mc_n", 20000);
  const double sigma = num_or(cfg, "sigma", 1.0);
  const double signal = num_or(cfg, "signal", 0.5);
  Eigen::VectorXd beta_true = Eigen::VectorXd::Zero(d);
  for (int j = 0; j < s; ++j) beta_true[j] = signal;
  TuneOptions tune = tune_options_from(cfg);
  if (!cfg.contains("penalty")) tune.kind = PenaltyKind::L1;
  if (!cfg.contains("shape")) tune.shape = default_shape(tune.kind);
  LinearGenerator gen{beta_true, sigma, 0.0};

  std::vector<double> gap_small(pairs, 0.0), gap_large(pairs, 0.0);
  parallel_for(pairs, [&](int r) {
    const std::uint64_t rs = derive_seed(seed, static_cast<std::uint64_t>(r));
    const std::uint64_t eval_seed = derive_seed(rs, 7);
    for (int which = 0; which < 2; ++which) {
      const int n = which == 0 ? n_small : n_large;
      Dataset data = generate_linear(n, beta_true, sigma, 0.0, derive_seed(rs, which + 1));
      GlmObjective obj(GlmModel{}, std::move(data));
      const TuningResult tuned = gcv_select(obj, tune);
      const GapEstimate gap = empirical_risk_gap(tuned.fit_at_chosen.beta, beta_true,
                                                 QLossKind::Quadratic, gen, mc_n, eval_seed);
      (which == 0 ? gap_small[r] : gap_large[r]) = gap.gap;
    }
  });

  Json report = report_skeleton("persistence", cfg, seed);
  int wins = 0;
  for (int r = 0; r < pairs; ++r)
    if (gap_large[r] < gap_small[r]) ++wins;
  report["results"]["pairs"] = pairs;
  report["results"]["fraction_improved"] = static_cast<double>(wins) / pairs;
  report["results"]["median_gap_small_n"] = median(gap_small);
  report["results"]["median_gap_large_n"] = median(gap_large);
  return report;
}

Json universal_threshold_experiment(const Json& cfg) {
  const std::uint64_t seed = require_seed(cfg);
  const int n = int_or(cfg, "n", 1024);
  const int d = int_or(cfg, "d", n);
  const int replicates = int_or(cfg, "replicates", 100);
  const double sigma = num_or(cfg, "sigma", 1.0);
  const double lambda = universal_lambda(n, sigma);

  // The design plays the role of the fixed orthonormal transform; noise is
  // redrawn per replicate.
  const Eigen::VectorXd beta0 = Eigen::VectorXd::Zero(d);
  const OrthonormalDraw base = generate_orthonormal(n, d, beta0, 0.0, derive_seed(seed, 999));

  std::vector<int> all_zero(replicates, 0);
  parallel_for(replicates, [&](int r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = sigma * rng.normal();
    const Eigen::VectorXd z = base.X.transpose() * y / static_cast<double>(n);
    const Eigen::VectorXd fitted =
        fit_orthonormal(z, PenaltySpec::l1(0.0), /*use_universal=*/true, n, sigma);
    all_zero[r] = (fitted.array() == 0.0).all() ? 1 : 0;
  });

  Json report = report_skeleton("universal_threshold", cfg, seed);
  int zeros = 0;
  for (int v : all_zero) zeros += v;
  report["results"]["replicates"] = replicates;
  report["results"]["lambda"] = lambda;
  report["results"]["all_zero_rate"] = static_cast<double>(zeros) / replicates;
  return report;
}

Json gcv_null_experiment(const Json& cfg) {
  const std::uint64_t seed = require_seed(cfg);
  const int n = int_or(cfg, "n", 200);
  const int d = int_or(cfg, "d", 8);
  const int replicates = int_or(cfg, "replicates", 100);
  const double sigma = num_or(cfg, "sigma", 1.0);
  const TuneOptions tune = tune_options_from(cfg);

  std::vector<int> near_empty(replicates, 0), endpoint_better(replicates, 0);
  parallel_for(replicates, [&](int r) {
    const std::uint64_t rs = derive_seed(seed, static_cast<std::uint64_t>(r));
    Dataset data = generate_linear(n, Eigen::VectorXd::Zero(d), sigma, 0.0, rs);
    GlmObjective obj(GlmModel{}, std::move(data));
    const TuningResult tuned = gcv_select(obj, tune);
    near_empty[r] = tuned.fit_at_chosen.active_set.size() <= 1 ? 1 : 0;
    endpoint_better[r] = tuned.gcv_scores.back() < tuned.gcv_scores.front() ? 1 : 0;
  });

  Json report = report_skeleton("gcv_null", cfg, seed);
  int ne = 0, eb = 0;
  for (int r = 0; r < replicates; ++r) {
    ne += near_empty[r];
    eb += endpoint_better[r];
  }
  report["results"]["replicates"] = replicates;
  report["results"]["near_empty_rate"] = static_cast<double>(ne) / replicates;
  report["results"]["large_lambda_beats_small_rate"] = static_cast<double>(eb) / replicates;
  return report;
}

Json subset_equivalence_experiment(const Json& cfg) {
  const std::uint64_t seed = require_seed(cfg);
  const int instances = int_or(cfg, "instances", 50);
  const int n = int_or(cfg, "n", 60);

  std::vector<int> agree(instances, 0);
  parallel_for(instances, [&](int r) {
    const std::uint64_t rs = derive_seed(seed, static_cast<std::uint64_t>(r));
    Rng rng(derive_seed(rs, 11));
    const int d = 3 + r % 8;  // d in 3..10
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
    for (int j = 0; j < d; ++j)
      if (rng.uniform() < 0.4) beta[j] = rng.normal(0.0, 1.0);
    const double lambda = rng.uniform(0.1, 0.6);
    Dataset data = generate_linear(n, beta, 1.0, 0.0, rs);

    const SubsetFit oracle = best_subset_oracle(data, lambda);
    GlmObjective obj(GlmModel{}, Dataset(data.X, data.y));
    std::vector<PenaltySpec> penalties(static_cast<std::size_t>(d), PenaltySpec::entropy(lambda));
    const FitResult entropy = lqa_fit(obj, penalties);
    agree[r] = entropy.active_set == oracle.subset ? 1 : 0;
  });

  Json report = report_skeleton("subset_equivalence", cfg, seed);
  int hits = 0;
  for (int a : agree) hits += a;
  report["results"]["instances"] = instances;
  report["results"]["agreement_rate"] = static_cast<double>(hits) / instances;
  return report;
}

Json orthonormal_equivalence_experiment(const Json& cfg) {
  const std::uint64_t seed = require_seed(cfg);
  const int n = int_or(cfg, "n", 256);
  const int d = int_or(cfg, "d", 32);
  const double sigma = num_or(cfg, "sigma", 1.0);
  const double lambda = num_or(cfg, "lambda", 0.25);

  Rng rng(derive_seed(seed, 5));
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
  for (int j = 0; j < d / 4; ++j) beta[j] = rng.normal(0.0, 1.5);
  const OrthonormalDraw draw = generate_orthonormal(n, d, beta, sigma, seed);

  const std::vector<PenaltySpec> kinds = {
      PenaltySpec::hard(lambda),           PenaltySpec::entropy(lambda),
      PenaltySpec::l1(lambda),             PenaltySpec::l2(lambda),
      PenaltySpec::bridge(lambda, 0.5),    PenaltySpec::scad(lambda, 3.7)};

  Json report = report_skeleton("orthonormal_equivalence", cfg, seed);
  Json per_kind = Json::object();
  double worst = 0.0;
  double min_margin = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < d; ++j)
    min_margin = std::min(min_margin, std::abs(std::abs(draw.z[j]) - lambda) / lambda);
  for (const auto& spec : kinds) {
    GlmObjective obj(GlmModel{}, Dataset(draw.X, draw.y));
    std::vector<PenaltySpec> penalties(static_cast<std::size_t>(d), spec);
    LqaConfig config;
    config.max_iter = int_or(cfg, "max_iter", 3000);
    config.tol = num_or(cfg, "tol", 1e-10);
    const FitResult fit = lqa_fit(obj, penalties, config);
    const Eigen::VectorXd direct = fit_orthonormal(draw.z, spec, false, n, sigma);
    const double dev = (fit.beta - direct).cwiseAbs().maxCoeff();
    per_kind[to_string(spec.kind)] = dev;
    worst = std::max(worst, dev);
  }
  report["results"]["max_deviation_by_kind"] = per_kind;
  report["results"]["max_deviation"] = worst;
  report["results"]["min_threshold_margin"] = min_margin;
  return report;
}

Json generate_to_files(const Json& cfg, const std::string& data_path) {
  const std::uint64_t seed = require_seed(cfg);
  const std::string kind = str_or(cfg, "kind", "linear");
  const int n = int_or(cfg, "n", 100);
  Json report = report_skeleton("simulate", cfg, seed);
  report["kind"] = kind;
  report["data_path"] = data_path;

  if (kind == "linear" || kind == "logistic" || kind == "poisson") {
    const Eigen::VectorXd beta = vector_or(cfg, "beta", Eigen::VectorXd::Zero(int_or(cfg, "d", 4)));
    const double ar_rho = num_or(cfg, "ar_rho", 0.0);
    Dataset data = kind == "linear"
                       ? generate_linear(n, beta, num_or(cfg, "sigma", 1.0), ar_rho, seed)
                       : kind == "logistic" ? generate_logistic(n, beta, ar_rho, seed)
                                            : generate_poisson(n, beta, ar_rho, seed);
    write_dataset_csv(data_path, data);
    report["n"] = static_cast<int>(data.n());
    report["d"] = static_cast<int>(data.d());
  } else if (kind == "survival") {
    const Eigen::VectorXd beta = vector_or(cfg, "beta", Eigen::VectorXd::Zero(int_or(cfg, "d", 4)));
    SurvivalData data = generate_survival(n, beta, num_or(cfg, "censor_rate", 0.5),
                                          num_or(cfg, "ar_rho", 0.0), seed);
    write_survival_csv(data_path, data);
    report["n"] = static_cast<int>(data.n());
    report["d"] = static_cast<int>(data.d());
    report["failures"] = static_cast<int>(data.n_failures());
  } else if (kind == "factor") {
    const int d = int_or(cfg, "d", 50);
    const int k = int_or(cfg, "k", 3);
    const FactorTruth truth = make_factor_truth(d, k, num_or(cfg, "sigma0_lo", 0.2),
                                                num_or(cfg, "sigma0_hi", 0.8),
                                                derive_seed(seed, 999));
    const FactorDraw draw = generate_factor_returns(n, truth, seed);
    std::vector<std::string> header;
    for (int j = 0; j < d; ++j) header.push_back("y" + std::to_string(j + 1));
    for (int j = 0; j < k; ++j) header.push_back("f" + std::to_string(j + 1));
    Eigen::MatrixXd all(n, d + k);
    all.leftCols(d) = draw.returns;
    all.rightCols(k) = draw.factors;
    write_csv(data_path, header, all);
    report["n"] = n;
    report["d"] = d;
    report["k"] = k;
  } else if (kind == "cholesky_ar") {
    const int d = int_or(cfg, "d", 10);
    const CholeskyTruth truth = make_banded_cholesky_truth(
        d, int_or(cfg, "band", 1), vector_or(cfg, "band_coefs", Eigen::VectorXd::Constant(1, 0.5)));
    const Eigen::MatrixXd w = generate_cholesky_sample(n, truth, seed);
    std::vector<std::string> header;
    for (int j = 0; j < d; ++j) header.push_back("w" + std::to_string(j + 1));
    write_csv(data_path, header, w);
    report["n"] = n;
    report["d"] = d;
  } else if (kind == "orthonormal") {
    const int d = int_or(cfg, "d", 32);
    const Eigen::VectorXd beta = vector_or(cfg, "beta", Eigen::VectorXd::Zero(d));
    const OrthonormalDraw draw =
        generate_orthonormal(n, d, beta, num_or(cfg, "sigma", 1.0), seed);
    write_dataset_csv(data_path, Dataset(draw.X, draw.y));
    report["n"] = n;
    report["d"] = d;
    report["z"] = to_json(draw.z);
  } else {
    throw InvalidArgument("generate: unknown kind '" + kind + "'");
  }
  return report;
}

Json run_experiment(const Json& cfg) {
  const std::string kind = str_or(cfg, "kind", "");
  if (kind == "oracle") return oracle_experiment(cfg);
  if (kind == "sandwich") return sandwich_experiment(cfg);
  if (kind == "cox_oracle") return cox_oracle_experiment(cfg);
  if (kind == "cholesky") return cholesky_experiment(cfg);
  if (kind == "factor_compare") return factor_compare_experiment(cfg);
  if (kind == "persistence") return persistence_experiment(cfg);
  if (kind == "universal_threshold") return universal_threshold_experiment(cfg);
  if (kind == "gcv_null") return gcv_null_experiment(cfg);
  if (kind == "subset_equivalence") return subset_equivalence_experiment(cfg);
  if (kind == "orthonormal_equivalence") return orthonormal_equivalence_experiment(cfg);
  throw InvalidArgument("run_experiment: unknown kind '" + kind + "'");
}

}  // namespace penlik
