#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/cox.hpp"
#include "core/errors.hpp"
#include "core/glm.hpp"
#include "core/lqa.hpp"
#include "core/rng.hpp"
#include "core/simulate.hpp"
#include "core/tuning.hpp"
#include "oracles.hpp"

using namespace penlik;

namespace {

FitResult fit_with(const GlmObjective& obj, const std::vector<PenaltySpec>& penalties) {
  return lqa_fit(obj, penalties);
}

}  // namespace

TEST_CASE("effective params equals active count without penalty") {
  Dataset data = generate_linear(
      50, (Eigen::VectorXd(3) << 1.0, -0.5, 0.25).finished(), 1.0, 0.0, 9);
  GlmObjective obj(GlmModel{}, std::move(data));
  std::vector<PenaltySpec> none(3, PenaltySpec::l1(0.0));
  const FitResult fit = fit_with(obj, none);
  CHECK(effective_params(fit, obj) == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("effective params of ridge on an orthonormal design is d/(1+2 lambda)") {
  const Eigen::Index n = 64, d = 6;
  const OrthonormalDraw draw = generate_orthonormal(
      n, d, Eigen::VectorXd::Ones(d), 0.5, 33);
  GlmObjective obj(GlmModel{}, Dataset(draw.X, draw.y));
  for (double lam : {0.1, 0.5, 2.0}) {
    std::vector<PenaltySpec> ridge(d, PenaltySpec::l2(lam));
    const FitResult fit = fit_with(obj, ridge);
    CHECK(effective_params(fit, obj) ==
          doctest::Approx(d / (1.0 + 2.0 * lam)).epsilon(1e-8));
  }
  // e(lambda) vanishes as the l1 penalty swamps every coordinate
  std::vector<PenaltySpec> l1(d, PenaltySpec::l1(50.0));
  const FitResult fit = fit_with(obj, l1);
  CHECK(effective_params(fit, obj) <= 0.2);
}

TEST_CASE("e(lambda) nonincreasing in lambda for ridge") {
  Dataset data = generate_linear(
      50, (Eigen::VectorXd(4) << 1, 1, 1, 1).finished(), 1.0, 0.4, 2);
  GlmObjective obj(GlmModel{}, std::move(data));
  double prev = std::numeric_limits<double>::infinity();
  for (double lam = 0.05; lam < 10.0; lam *= 1.7) {
    std::vector<PenaltySpec> ridge(4, PenaltySpec::l2(lam));
    const double e = effective_params(fit_with(obj, ridge), obj);
    CHECK(e <= prev + 1e-10);
    prev = e;
  }
}

TEST_CASE("gcv scores equal the display recomputed from (loglik, e) pairs") {
  Dataset data = generate_linear(
      80, (Eigen::VectorXd(5) << 2, 0, 1, 0, 0).finished(), 1.0, 0.0, 51);
  GlmObjective obj(GlmModel{}, std::move(data));
  TuneOptions tune;
  tune.kind = PenaltyKind::Scad;
  tune.shape = 3.7;
  tune.grid_size = 12;
  const TuningResult result = gcv_select(obj, tune);
  REQUIRE(result.lambda_grid.size() == 12);
  const double n = static_cast<double>(obj.n_obs());
  for (std::size_t i = 0; i < result.lambda_grid.size(); ++i) {
    std::vector<PenaltySpec> penalties;
    for (Eigen::Index j = 0; j < obj.dim(); ++j)
      penalties.push_back(PenaltySpec::scad(result.lambda_grid[i] * result.se_scale[j]));
    const FitResult fit = lqa_fit(obj, penalties);
    const double e = effective_params(fit, obj);
    const double ell = n * obj.avg_value(fit.beta);
    const double expect = -ell / (n * std::pow(1.0 - e / n, 2.0));
    CHECK(result.gcv_scores[i] == doctest::Approx(expect).epsilon(1e-10));
  }
  // chosen index is the argmin of the stored scores
  std::size_t argmin = 0;
  for (std::size_t i = 1; i < result.gcv_scores.size(); ++i)
    if (result.gcv_scores[i] < result.gcv_scores[argmin]) argmin = i;
  CHECK(result.chosen_index == argmin);
  CHECK(result.chosen_lambda == result.lambda_grid[argmin]);
}

TEST_CASE("grid of one point is chosen") {
  Dataset data = generate_linear(
      40, (Eigen::VectorXd(2) << 1, 0).finished(), 1.0, 0.0, 3);
  GlmObjective obj(GlmModel{}, std::move(data));
  TuneOptions tune;
  tune.lambda_grid = {0.37};
  const TuningResult result = gcv_select(obj, tune);
  CHECK(result.chosen_lambda == 0.37);
  CHECK(result.gcv_scores.size() == 1);
}

TEST_CASE("rank invariance: scaling the grid against the se scale changes nothing") {
  Dataset data = generate_linear(
      60, (Eigen::VectorXd(4) << 1.5, 0, -1.0, 0).finished(), 1.0, 0.0, 8);
  GlmObjective obj(GlmModel{}, std::move(data));
  const Eigen::VectorXd se = observed_information_se(obj, *maximize_unpenalized(obj));

  TuneOptions a;
  a.kind = PenaltyKind::Scad;
  a.shape = 3.7;
  a.lambda_grid = {0.25, 0.5, 1.0, 2.0};
  a.se_override = se;
  const TuningResult ra = gcv_select(obj, a);

  TuneOptions b = a;
  for (double& lam : b.lambda_grid) lam *= 2.0;  // power of two: exact arithmetic
  b.se_override = Eigen::VectorXd(se / 2.0);
  const TuningResult rb = gcv_select(obj, b);

  CHECK(ra.chosen_index == rb.chosen_index);
  CHECK((ra.fit_at_chosen.beta - rb.fit_at_chosen.beta).cwiseAbs().maxCoeff() == 0.0);
  CHECK((ra.per_coordinate_lambda - rb.per_coordinate_lambda).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sandwich reduces to the heteroskedasticity-robust OLS covariance") {
  const Eigen::Index n = 50, d = 3;
  Rng rng(1234);
  Eigen::MatrixXd x = generate_design(n, d, 0.0, 77);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i)
    y[i] = x(i, 0) - 0.5 * x(i, 2) + (0.5 + 0.2 * std::abs(x(i, 1))) * rng.normal();
  GlmObjective obj(GlmModel{}, Dataset(x, y));
  std::vector<PenaltySpec> none(d, PenaltySpec::l1(0.0));
  const FitResult fit = lqa_fit(obj, none);
  REQUIRE(fit.active_set.size() == static_cast<std::size_t>(d));
  const Eigen::MatrixXd cov = sandwich_cov(fit, obj, none);

  // independent route: (X'X)^{-1} X' diag(r^2) X (X'X)^{-1}
  const Eigen::VectorXd beta_ols =
      (x.transpose() * x).ldlt().solve(x.transpose() * y);
  const Eigen::VectorXd r = y - x * beta_ols;
  const Eigen::MatrixXd bread = (x.transpose() * x).inverse();
  const Eigen::MatrixXd meat = x.transpose() * r.cwiseAbs2().asDiagonal() * x;
  // centered score covariance: the score mean is zero at the OLS solution
  const Eigen::MatrixXd expect = bread * meat * bread;
  CHECK((cov - expect).cwiseAbs().maxCoeff() < 1e-8 * expect.cwiseAbs().maxCoeff());
}

TEST_CASE("sandwich halves when every row is duplicated") {
  Dataset data = generate_linear(
      40, (Eigen::VectorXd(3) << 1, 0.5, -1).finished(), 1.0, 0.0, 21);
  Eigen::MatrixXd x2(80, 3);
  x2 << data.X, data.X;
  Eigen::VectorXd y2(80);
  y2 << data.y, data.y;
  GlmObjective obj1(GlmModel{}, Dataset(data.X, data.y));
  GlmObjective obj2(GlmModel{}, Dataset(x2, y2));
  std::vector<PenaltySpec> none(3, PenaltySpec::l1(0.0));
  const FitResult f1 = lqa_fit(obj1, none);
  const FitResult f2 = lqa_fit(obj2, none);
  const Eigen::MatrixXd c1 = sandwich_cov(f1, obj1, none);
  const Eigen::MatrixXd c2 = sandwich_cov(f2, obj2, none);
  CHECK((c2 - 0.5 * c1).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("sandwich is symmetric PSD with nonnegative diagonal") {
  Dataset data = generate_logistic(
      200, (Eigen::VectorXd(4) << 1.0, 0, -0.8, 0.3).finished(), 0.0, 5150);
  GlmObjective obj(GlmModel{Family::Logistic, 1.0}, std::move(data));
  std::vector<PenaltySpec> penalties(4, PenaltySpec::scad(0.02));
  const FitResult fit = lqa_fit(obj, penalties);
  REQUIRE(!fit.active_set.empty());
  const Eigen::MatrixXd cov = sandwich_cov(fit, obj, penalties);
  CHECK((cov - cov.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::VectorXd evals = cov.selfadjointView<Eigen::Lower>().eigenvalues();
  CHECK(evals.minCoeff() > -1e-10);
  for (Eigen::Index i = 0; i < cov.rows(); ++i) CHECK(cov(i, i) >= 0.0);

  FitResult empty = fit;
  empty.active_set.clear();
  CHECK_THROWS_AS(sandwich_cov(empty, obj, penalties), InvalidArgument);
}

TEST_CASE("classical criteria definitional cases") {
  Dataset data = generate_linear(
      60, (Eigen::VectorXd(3) << 1.0, 0.0, -2.0).finished(), 0.0, 0.0, 12);
  const double n = static_cast<double>(data.n());

  std::vector<std::vector<Eigen::Index>> subsets = {{}, {0, 1, 2}, {0, 2}};
  const auto rows = classical_criteria(data, subsets, 0.3);
  REQUIRE(rows.size() == 3);

  // null subset: RSS_1 = centered total sum of squares, adjusted R^2 = 0
  const double tss = (data.y.array() - data.y.mean()).matrix().squaredNorm();
  CHECK(rows[0].rss == doctest::Approx(tss).epsilon(1e-12));
  CHECK(rows[0].adjusted_r2 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rows[0].gcv == doctest::Approx(tss / (n * std::pow(1.0 - 1.0 / n, 2))));
  CHECK(rows[0].pls == doctest::Approx(tss / (2 * n) + 0.5 * 0.09));

  // saturated fit on noiseless data: RSS = 0
  CHECK(rows[1].rss == doctest::Approx(0.0).scale(tss).epsilon(1e-12));
  CHECK(rows[2].rss == doctest::Approx(0.0).scale(tss).epsilon(1e-12));

  CHECK_THROWS_AS(classical_criteria(data, {{5}}, 0.0), InvalidArgument);
}

TEST_CASE("adjusted-R2 expansion: log(RSS_m/(n-m)) Taylor identity") {
  // noise-only fit indices on a big-n Gaussian draw; subsets contain the truth
  Dataset data = generate_linear(
      400, (Eigen::VectorXd(6) << 2, 1, 0, 0, 0, 0).finished(), 1.0, 0.0, 5);
  const double n = static_cast<double>(data.n());
  std::vector<std::vector<Eigen::Index>> subsets = {
      {0, 1}, {0, 1, 2}, {0, 1, 2, 3}, {0, 1, 2, 3, 4, 5}};
  const auto rows = classical_criteria(data, subsets, 0.0);
  // sigma^2 estimated from the full model
  const double sigma2 = rows.back().rss / (n - 7.0);
  for (const auto& row : rows) {
    const double m = static_cast<double>(row.subset.size()) + 1.0;
    if (m / n > 0.05) continue;
    const double lhs = std::log(row.rss / (n - m));
    const double rhs = (std::log(sigma2) - 1.0) + (row.rss / n + m * sigma2 / n) / sigma2;
    CHECK(std::abs(lhs - rhs) <= 0.02);
  }
}

TEST_CASE("gcv for cox uses the partial likelihood") {
  SurvivalData data = generate_survival(
      150, (Eigen::VectorXd(4) << 0.9, 0, 0.7, 0).finished(), 0.7, 0.0, 1717);
  CoxObjective obj(data);
  TuneOptions tune;
  tune.grid_size = 15;
  const TuningResult result = gcv_select(obj, tune);
  CHECK(result.fit_at_chosen.converged);
  CHECK(result.gcv_scores.size() == 15);
  // scores recompute from the definition
  const double n = static_cast<double>(obj.n_obs());
  const double e = effective_params(result.fit_at_chosen, obj);
  const double ell = n * obj.avg_value(result.fit_at_chosen.beta);
  CHECK(result.gcv_scores[result.chosen_index] ==
        doctest::Approx(-ell / (n * std::pow(1.0 - e / n, 2))).epsilon(1e-10));
}
