// Exercises the shared-library C surface the way an external consumer would.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "penlik.h"

namespace {

struct Cleanup {
  std::vector<penlik_dataset*> datasets;
  std::vector<penlik_fit*> fits;
  std::vector<penlik_tuning*> tunings;
  ~Cleanup() {
    for (auto* f : fits) penlik_fit_free(f);
    for (auto* t : tunings) penlik_tuning_free(t);
    for (auto* d : datasets) penlik_dataset_free(d);
  }
};

}  // namespace

TEST_CASE("penalty surface") {
  double v = 0.0;
  REQUIRE(penlik_penalty_value(PENLIK_PENALTY_L1, 1.0, 0.0, 2.0, &v) == PENLIK_OK);
  CHECK(v == doctest::Approx(2.0));
  REQUIRE(penlik_threshold(PENLIK_PENALTY_SCAD, 1.0, 3.7, 3.0, &v) == PENLIK_OK);
  CHECK(v == doctest::Approx(2.588235294117647));
  REQUIRE(penlik_penalty_deriv(PENLIK_PENALTY_SCAD, 1.0, 0.0, 2.0, &v) == PENLIK_OK);
  CHECK(v == doctest::Approx(1.7 / 2.7));

  int s = -1, u = -1, c = -1;
  REQUIRE(penlik_check_properties(PENLIK_PENALTY_SCAD, 1.0, 0.0, &s, &u, &c) == PENLIK_OK);
  CHECK((s == 1 && u == 1 && c == 1));

  // error path: negative beta_abs
  CHECK(penlik_penalty_value(PENLIK_PENALTY_L1, 1.0, 0.0, -1.0, &v) ==
        PENLIK_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(penlik_last_error()) > 0);

  REQUIRE(penlik_universal_lambda(1024, 1.0, &v) == PENLIK_OK);
  CHECK(v == doctest::Approx(std::sqrt(2.0 * std::log(1024.0) / 1024.0)).epsilon(1e-14));
}

TEST_CASE("dataset and glm fit round trip") {
  Cleanup guard;
  // y = 2 x1 - x3 + small noise, n = 400 (deterministic pseudo-noise)
  const int64_t n = 400, d = 3;
  std::vector<double> x(static_cast<std::size_t>(n * d));
  std::vector<double> y(static_cast<std::size_t>(n));
  unsigned long long state = 88172645463325252ULL;
  auto next_unit = [&]() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return static_cast<double>(state >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  };
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < d; ++j) x[static_cast<std::size_t>(i * d + j)] = next_unit() * 2.0;
    y[static_cast<std::size_t>(i)] = 2.0 * x[static_cast<std::size_t>(i * d)] -
                                     x[static_cast<std::size_t>(i * d + 2)] + 0.1 * next_unit();
  }
  penlik_dataset* ds = nullptr;
  REQUIRE(penlik_dataset_create(x.data(), n, d, y.data(), &ds) == PENLIK_OK);
  guard.datasets.push_back(ds);
  CHECK(penlik_dataset_n(ds) == n);
  CHECK(penlik_dataset_d(ds) == d);
  CHECK(penlik_dataset_is_survival(ds) == 0);

  std::vector<double> lambdas(static_cast<std::size_t>(d), 0.08);
  penlik_fit* fit = nullptr;
  REQUIRE(penlik_fit_glm(ds, PENLIK_FAMILY_GAUSSIAN, PENLIK_PENALTY_SCAD, 0.0, lambdas.data(),
                         nullptr, &fit) == PENLIK_OK);
  guard.fits.push_back(fit);
  CHECK(penlik_fit_converged(fit) == 1);
  CHECK(penlik_fit_dim(fit) == d);
  std::vector<double> coefs(static_cast<std::size_t>(d));
  REQUIRE(penlik_fit_coefficients(fit, coefs.data()) == PENLIK_OK);
  CHECK(coefs[0] == doctest::Approx(2.0).epsilon(0.05));
  CHECK(coefs[1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(coefs[2] == doctest::Approx(-1.0).epsilon(0.05));
  CHECK(penlik_fit_n_active(fit) == 2);
  std::vector<int64_t> active(2);
  REQUIRE(penlik_fit_active_set(fit, active.data()) == PENLIK_OK);
  CHECK(active[0] == 0);
  CHECK(active[1] == 2);

  double stat = -1.0;
  REQUIRE(penlik_fit_stationarity_max(fit, &stat) == PENLIK_OK);
  CHECK(stat <= 1e-6 * static_cast<double>(n));
  double e = 0.0;
  REQUIRE(penlik_fit_effective_params(fit, &e) == PENLIK_OK);
  CHECK(e > 0.0);
  CHECK(e <= static_cast<double>(d) + 1e-9);

  std::vector<double> cov(4);
  REQUIRE(penlik_fit_sandwich(fit, cov.data()) == PENLIK_OK);
  CHECK(cov[0] > 0.0);
  CHECK(cov[3] > 0.0);
  CHECK(cov[1] == doctest::Approx(cov[2]).epsilon(1e-12));

  char* json = nullptr;
  REQUIRE(penlik_fit_to_json(fit, &json) == PENLIK_OK);
  CHECK(std::string(json).find("\"coefficients\"") != std::string::npos);
  penlik_string_free(json);

  // tuning over an auto grid selects something sparse and sane
  penlik_tuning* tuning = nullptr;
  REQUIRE(penlik_tune(ds, PENLIK_FAMILY_GAUSSIAN, PENLIK_PENALTY_SCAD, 0.0, nullptr, nullptr, 0,
                      25, &tuning) == PENLIK_OK);
  guard.tunings.push_back(tuning);
  CHECK(penlik_tuning_grid_len(tuning) == 25);
  CHECK(penlik_tuning_chosen_lambda(tuning) > 0.0);
  penlik_fit* best = nullptr;
  REQUIRE(penlik_tuning_fit(tuning, &best) == PENLIK_OK);
  guard.fits.push_back(best);
  // the two real signals are kept; any extra coordinate GCV retains is tiny
  std::vector<double> chosen(static_cast<std::size_t>(d));
  REQUIRE(penlik_fit_coefficients(best, chosen.data()) == PENLIK_OK);
  CHECK(chosen[0] == doctest::Approx(2.0).epsilon(0.05));
  CHECK(chosen[2] == doctest::Approx(-1.0).epsilon(0.05));
  CHECK(std::abs(chosen[1]) < 0.05);
}

TEST_CASE("survival fit through the C surface") {
  Cleanup guard;
  const int64_t n = 120, d = 2;
  std::vector<double> x(static_cast<std::size_t>(n * d));
  std::vector<double> time(static_cast<std::size_t>(n));
  std::vector<int32_t> status(static_cast<std::size_t>(n));
  unsigned long long state = 1234567ULL;
  auto unit = [&]() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return static_cast<double>(state >> 11) * 0x1.0p-53;
  };
  for (int64_t i = 0; i < n; ++i) {
    const double x0 = unit() * 2.0 - 1.0, x1 = unit() * 2.0 - 1.0;
    x[static_cast<std::size_t>(i * d)] = x0;
    x[static_cast<std::size_t>(i * d + 1)] = x1;
    const double hazard = std::exp(0.9 * x0);
    time[static_cast<std::size_t>(i)] = -std::log(unit()) / hazard;
    status[static_cast<std::size_t>(i)] = i % 5 == 0 ? 0 : 1;
  }
  penlik_dataset* ds = nullptr;
  REQUIRE(penlik_dataset_create_survival(x.data(), n, d, time.data(), status.data(), &ds) ==
          PENLIK_OK);
  guard.datasets.push_back(ds);
  CHECK(penlik_dataset_is_survival(ds) == 1);
  std::vector<double> lambdas(static_cast<std::size_t>(d), 0.05);
  penlik_fit* fit = nullptr;
  REQUIRE(penlik_fit_cox(ds, PENLIK_PENALTY_SCAD, 0.0, lambdas.data(), nullptr, &fit) ==
          PENLIK_OK);
  guard.fits.push_back(fit);
  std::vector<double> coefs(static_cast<std::size_t>(d));
  REQUIRE(penlik_fit_coefficients(fit, coefs.data()) == PENLIK_OK);
  CHECK(coefs[0] > 0.3);

  // GLM fit on a survival dataset must fail cleanly
  penlik_fit* bad = nullptr;
  CHECK(penlik_fit_glm(ds, PENLIK_FAMILY_GAUSSIAN, PENLIK_PENALTY_L1, 0.0, lambdas.data(),
                       nullptr, &bad) == PENLIK_ERR_INVALID_ARGUMENT);
}

TEST_CASE("qloss, risk gap, orthonormal fit") {
  double v = 0.0;
  REQUIRE(penlik_qloss_value(PENLIK_LOSS_QUADRATIC, 1.0, 0.7, 0.2, &v) == PENLIK_OK);
  CHECK(v == doctest::Approx(0.25));
  REQUIRE(penlik_qloss_value(PENLIK_LOSS_MISCLASSIFICATION, 0.0, 1.0, -0.3, &v) == PENLIK_OK);
  CHECK(v == doctest::Approx(1.0));

  std::vector<double> beta_true = {1.0, 0.0};
  std::vector<double> beta_hat = {1.3, 0.0};
  double gap = 0.0, se = 0.0;
  REQUIRE(penlik_risk_gap(PENLIK_LOSS_QUADRATIC, beta_hat.data(), beta_true.data(),
                          beta_true.data(), 2, 1.0, 0.0, 50000, 5, &gap, &se) == PENLIK_OK);
  CHECK(gap == doctest::Approx(0.09).epsilon(0.1));
  CHECK(penlik_risk_gap(PENLIK_LOSS_QUADRATIC, beta_hat.data(), beta_true.data(),
                        beta_true.data(), 2, 1.0, 0.0, 10, 5, &gap, &se) ==
        PENLIK_ERR_INVALID_ARGUMENT);

  std::vector<double> z = {0.05, -0.5, 2.0};
  std::vector<double> out(3);
  REQUIRE(penlik_fit_orthonormal(z.data(), 3, PENLIK_PENALTY_L1, 0.0, 0.0, 1, 1024, 1.0,
                                 out.data()) == PENLIK_OK);
  CHECK(out[0] == 0.0);
  CHECK(out[2] != 0.0);
}

TEST_CASE("covariance surfaces") {
  // AR(1)-flavored 3-column sample
  const int64_t n = 500, d = 3;
  std::vector<double> w(static_cast<std::size_t>(n * d));
  unsigned long long state = 424242ULL;
  auto unit = [&]() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return static_cast<double>(state >> 11) * 0x1.0p-53;
  };
  auto gauss = [&]() {
    const double u1 = std::max(unit(), 1e-12), u2 = unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  };
  for (int64_t i = 0; i < n; ++i) {
    double prev = 0.0;
    for (int64_t j = 0; j < d; ++j) {
      prev = 0.6 * prev + gauss();
      w[static_cast<std::size_t>(i * d + j)] = prev;
    }
  }
  penlik_chol_cov* chol = nullptr;
  REQUIRE(penlik_cov_cholesky(w.data(), n, d, PENLIK_PENALTY_SCAD, 0.0, 1, 0.0, &chol) ==
          PENLIK_OK);
  CHECK(penlik_chol_cov_dim(chol) == d);
  std::vector<double> phi(9), dd(3), sigma(9), precision(9);
  REQUIRE(penlik_chol_cov_get(chol, phi.data(), dd.data(), sigma.data(), precision.data()) ==
          PENLIK_OK);
  CHECK(phi[1 * 3 + 0] == doctest::Approx(0.6).epsilon(0.15));
  char* json = nullptr;
  REQUIRE(penlik_chol_cov_to_json(chol, &json) == PENLIK_OK);
  CHECK(std::string(json).find("\"precision\"") != std::string::npos);
  penlik_string_free(json);
  penlik_chol_cov_free(chol);

  // factor covariance on a 2-factor toy
  const int64_t k = 2, nf = 200, df = 5;
  std::vector<double> f(static_cast<std::size_t>(nf * k));
  std::vector<double> y(static_cast<std::size_t>(nf * df));
  std::vector<double> loadings(static_cast<std::size_t>(df * k));
  for (auto& b : loadings) b = gauss();
  for (int64_t t = 0; t < nf; ++t) {
    const double f0 = gauss(), f1 = gauss();
    f[static_cast<std::size_t>(t * k)] = f0;
    f[static_cast<std::size_t>(t * k + 1)] = f1;
    for (int64_t i = 0; i < df; ++i)
      y[static_cast<std::size_t>(t * df + i)] =
          loadings[static_cast<std::size_t>(i * k)] * f0 +
          loadings[static_cast<std::size_t>(i * k + 1)] * f1 + 0.3 * gauss();
  }
  penlik_factor_cov* fc = nullptr;
  REQUIRE(penlik_cov_factor(y.data(), nf, df, f.data(), k, &fc) == PENLIK_OK);
  std::vector<double> sigma_f(static_cast<std::size_t>(df * df));
  REQUIRE(penlik_factor_cov_get(fc, nullptr, nullptr, nullptr, sigma_f.data()) == PENLIK_OK);
  penlik_factor_cov_free(fc);

  // estimator comparison on the exact answer
  std::vector<double> eye(static_cast<std::size_t>(df * df), 0.0);
  for (int64_t i = 0; i < df; ++i) eye[static_cast<std::size_t>(i * df + i)] = 1.0;
  const double* ests[1] = {eye.data()};
  std::vector<double> xi(static_cast<std::size_t>(df), 1.0 / static_cast<double>(df));
  char* cmp = nullptr;
  REQUIRE(penlik_compare_estimators_json(eye.data(), df, ests, 1, xi.data(), &cmp) == PENLIK_OK);
  CHECK(std::string(cmp).find("precision_metric") != std::string::npos);
  penlik_string_free(cmp);
}

TEST_CASE("experiment runner and generation through the C surface") {
  char* report = nullptr;
  REQUIRE(penlik_experiment_run(
              R"({"kind":"gcv_null","seed":5,"replicates":4,"n":50,"d":3})", &report) ==
          PENLIK_OK);
  std::string text = report;
  penlik_string_free(report);
  CHECK(text.find("near_empty_rate") != std::string::npos);

  CHECK(penlik_experiment_run(R"({"kind":"nope","seed":1})", &report) ==
        PENLIK_ERR_INVALID_ARGUMENT);
  CHECK(penlik_experiment_run("{not json", &report) == PENLIK_ERR_INVALID_ARGUMENT);

  const char* path = "/tmp/penlik_capi_gen.csv";
  REQUIRE(penlik_generate(R"({"kind":"linear","seed":9,"n":20,"beta":[1.0,0.0]})", path,
                          &report) == PENLIK_OK);
  penlik_string_free(report);
  penlik_dataset* ds = nullptr;
  REQUIRE(penlik_dataset_read_csv(path, 0, &ds) == PENLIK_OK);
  CHECK(penlik_dataset_n(ds) == 20);
  CHECK(penlik_dataset_d(ds) == 2);
  penlik_dataset_free(ds);
  std::remove(path);

  // matrix csv reader
  double* buf = nullptr;
  int64_t rn = 0, rd = 0;
  REQUIRE(penlik_generate(R"({"kind":"cholesky_ar","seed":3,"n":15,"d":4})",
                          "/tmp/penlik_capi_chol.csv", &report) == PENLIK_OK);
  penlik_string_free(report);
  REQUIRE(penlik_read_matrix_csv("/tmp/penlik_capi_chol.csv", &buf, &rn, &rd) == PENLIK_OK);
  CHECK(rn == 15);
  CHECK(rd == 4);
  penlik_buffer_free(buf);
  std::remove("/tmp/penlik_capi_chol.csv");

  // best subset through the C surface
  REQUIRE(penlik_generate(R"({"kind":"linear","seed":21,"n":50,"beta":[2.0,0.0,1.0]})",
                          "/tmp/penlik_capi_bss.csv", &report) == PENLIK_OK);
  penlik_string_free(report);
  REQUIRE(penlik_dataset_read_csv("/tmp/penlik_capi_bss.csv", 0, &ds) == PENLIK_OK);
  std::vector<int64_t> subset(3);
  std::vector<double> beta(3);
  int64_t len = 0;
  REQUIRE(penlik_best_subset(ds, 0.3, 15, subset.data(), &len, beta.data()) == PENLIK_OK);
  CHECK(len == 2);
  CHECK(subset[0] == 0);
  CHECK(subset[1] == 2);
  char* crit = nullptr;
  REQUIRE(penlik_classical_criteria_json(ds, 0.3, 15, &crit) == PENLIK_OK);
  CHECK(std::string(crit).find("adjusted_r2") != std::string::npos);
  penlik_string_free(crit);
  penlik_dataset_free(ds);
  std::remove("/tmp/penlik_capi_bss.csv");
}

TEST_CASE("erm fit through the C surface") {
  const int64_t n = 60, d = 3;
  std::vector<double> x(static_cast<std::size_t>(n * d));
  std::vector<double> y(static_cast<std::size_t>(n));
  unsigned long long state = 777ULL;
  auto unit = [&]() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return static_cast<double>(state >> 11) * 0x1.0p-53;
  };
  for (int64_t i = 0; i < n; ++i) {
    x[static_cast<std::size_t>(i * d)] = 1.0;  // intercept
    const double x1 = unit() * 2.0 - 1.0, x2 = unit() * 2.0 - 1.0;
    x[static_cast<std::size_t>(i * d + 1)] = x1;
    x[static_cast<std::size_t>(i * d + 2)] = x2;
    y[static_cast<std::size_t>(i)] = 2.0 * x1 - 0.5 + 0.1 * (unit() - 0.5) > 0.0 ? 1.0 : -1.0;
  }
  penlik_dataset* ds = nullptr;
  REQUIRE(penlik_dataset_create(x.data(), n, d, y.data(), &ds) == PENLIK_OK);
  std::vector<double> lambdas = {0.0, 0.01, 0.01};
  penlik_fit* fit = nullptr;
  REQUIRE(penlik_fit_erm(ds, PENLIK_LOSS_HINGE, 1e-3, PENLIK_PENALTY_L1, 0.0, lambdas.data(),
                         &fit) == PENLIK_OK);
  double hinge_obj = 0.0;
  REQUIRE(penlik_fit_exact_hinge_objective(fit, &hinge_obj) == PENLIK_OK);
  CHECK(hinge_obj >= 0.0);
  std::vector<double> coefs(static_cast<std::size_t>(d));
  REQUIRE(penlik_fit_coefficients(fit, coefs.data()) == PENLIK_OK);
  CHECK(coefs[1] > 0.0);  // separating direction recovered
  penlik_fit_free(fit);
  penlik_dataset_free(ds);
}
