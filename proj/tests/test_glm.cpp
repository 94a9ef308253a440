#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/errors.hpp"
#include "core/glm.hpp"
#include "core/rng.hpp"
#include "core/simulate.hpp"
#include "oracles.hpp"

using namespace penlik;

namespace {

Dataset random_dataset(Family family, Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd beta(d);
  for (Eigen::Index j = 0; j < d; ++j) beta[j] = rng.normal(0.0, 0.5);
  switch (family) {
    case Family::Gaussian: return generate_linear(n, beta, 1.0, 0.0, seed);
    case Family::Logistic: return generate_logistic(n, beta, 0.0, seed);
    case Family::Poisson: return generate_poisson(n, beta, 0.0, seed);
  }
  throw InvalidArgument("unreachable");
}

}  // namespace

TEST_CASE("logistic log-likelihood at beta = 0 is -log 2") {
  Dataset data = random_dataset(Family::Logistic, 40, 3, 11);
  const GlmModel model{Family::Logistic, 1.0};
  CHECK(avg_loglik(model, Eigen::VectorXd::Zero(3), data) ==
        doctest::Approx(-std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("poisson log-likelihood with a zero design column") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 1);
  Eigen::VectorXd y(2);
  y << 1, 2;
  Dataset data(x, y);
  const GlmModel model{Family::Poisson, 1.0};
  CHECK(avg_loglik(model, Eigen::VectorXd::Zero(1), data) == doctest::Approx(-1.0));
}

TEST_CASE("gaussian score vanishes at the OLS solution") {
  Dataset data = random_dataset(Family::Gaussian, 60, 4, 5);
  const Eigen::VectorXd ols =
      (data.X.transpose() * data.X).ldlt().solve(data.X.transpose() * data.y);
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  score_and_hessian(GlmModel{Family::Gaussian, 1.0}, ols, data, grad, hess);
  CHECK(grad.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("gaussian derivatives on a hand instance") {
  Eigen::MatrixXd x(3, 2);
  x << 1, 0, 0, 1, 1, 1;
  Eigen::VectorXd y(3);
  y << 2, -1, 0.5;
  Dataset data(x, y);
  Eigen::VectorXd beta(2);
  beta << 0.3, -0.2;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  score_and_hessian(GlmModel{Family::Gaussian, 1.0}, beta, data, grad, hess);
  const Eigen::VectorXd expect_grad = x.transpose() * (y - x * beta) / 3.0;
  const Eigen::MatrixXd expect_hess = -x.transpose() * x / 3.0;
  CHECK((grad - expect_grad).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((hess - expect_hess).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("logistic score at beta = 0 is X'(y - 1/2)/n") {
  Dataset data = random_dataset(Family::Logistic, 30, 3, 17);
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  score_and_hessian(GlmModel{Family::Logistic, 1.0}, Eigen::VectorXd::Zero(3), data, grad, hess);
  const Eigen::VectorXd expect =
      data.X.transpose() * (data.y.array() - 0.5).matrix() / static_cast<double>(data.n());
  CHECK((grad - expect).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("derivatives match finite differences across families") {
  Rng rng(31);
  for (Family family : {Family::Gaussian, Family::Logistic, Family::Poisson}) {
    const GlmModel model{family, 1.0};
    for (int rep = 0; rep < 25; ++rep) {
      Dataset data = random_dataset(family, 25, 3, 1000 + rep);
      Eigen::VectorXd beta(3);
      for (int j = 0; j < 3; ++j) beta[j] = rng.normal(0.0, 0.4);
      Eigen::VectorXd grad;
      Eigen::MatrixXd hess;
      score_and_hessian(model, beta, data, grad, hess);
      const auto f = [&](const Eigen::VectorXd& b) { return avg_loglik(model, b, data); };
      const Eigen::VectorXd fd_g = oracles::fd_gradient(f, beta);
      CHECK((grad - fd_g).cwiseAbs().maxCoeff() <
            1e-6 * std::max(1.0, grad.cwiseAbs().maxCoeff()));
      const Eigen::MatrixXd fd_h = oracles::fd_hessian(f, beta);
      CHECK((hess - fd_h).cwiseAbs().maxCoeff() <
            1e-4 * std::max(1.0, hess.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("hessian symmetric negative semidefinite; logistic loglik nonpositive") {
  Rng rng(47);
  for (Family family : {Family::Gaussian, Family::Logistic, Family::Poisson}) {
    const GlmModel model{family, 1.0};
    Dataset data = random_dataset(family, 40, 4, 99);
    for (int rep = 0; rep < 10; ++rep) {
      Eigen::VectorXd beta(4);
      for (int j = 0; j < 4; ++j) beta[j] = rng.normal(0.0, 0.6);
      Eigen::VectorXd grad;
      Eigen::MatrixXd hess;
      score_and_hessian(model, beta, data, grad, hess);
      CHECK((hess - hess.transpose()).cwiseAbs().maxCoeff() < 1e-12);
      const Eigen::VectorXd evals = hess.selfadjointView<Eigen::Lower>().eigenvalues();
      CHECK(evals.maxCoeff() < 1e-10);
      if (family == Family::Logistic) {
        CHECK(avg_loglik(model, beta, data) <= 0.0);
        const Eigen::MatrixXd xtx =
            data.X.transpose() * data.X / static_cast<double>(data.n());
        const double bound = 0.25 * xtx.selfadjointView<Eigen::Lower>().eigenvalues().maxCoeff();
        CHECK(evals.minCoeff() >= -bound - 1e-10);
      }
    }
  }
}

TEST_CASE("concavity along random directions") {
  Rng rng(53);
  for (Family family : {Family::Gaussian, Family::Logistic, Family::Poisson}) {
    const GlmModel model{family, 1.0};
    Dataset data = random_dataset(family, 50, 3, 7);
    for (int rep = 0; rep < 50; ++rep) {
      Eigen::VectorXd beta(3), dir(3);
      for (int j = 0; j < 3; ++j) {
        beta[j] = rng.normal(0.0, 0.5);
        dir[j] = rng.normal();
      }
      dir.normalize();
      const double h = 1e-3;
      const double second = avg_loglik(model, beta + h * dir, data) -
                            2.0 * avg_loglik(model, beta, data) +
                            avg_loglik(model, beta - h * dir, data);
      CHECK(second <= 1e-8);
    }
  }
}

TEST_CASE("stable logistic evaluation at extreme linear predictors") {
  Eigen::MatrixXd x(2, 1);
  x << 500.0, -500.0;
  Eigen::VectorXd y(2);
  y << 1, 0;
  Dataset data(x, y);
  Eigen::VectorXd beta(1);
  beta << 2.0;
  const double v = avg_loglik(GlmModel{Family::Logistic, 1.0}, beta, data);
  CHECK(std::isfinite(v));
  CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("contract errors") {
  Dataset data = random_dataset(Family::Gaussian, 10, 2, 3);
  CHECK_THROWS_AS(avg_loglik(GlmModel{}, Eigen::VectorXd::Zero(3), data), InvalidArgument);
  Eigen::MatrixXd x(2, 1);
  x << 1, 2;
  Eigen::VectorXd bad(2);
  bad << 0.5, 1.0;
  Dataset frac(x, bad);
  CHECK_THROWS_AS(avg_loglik(GlmModel{Family::Logistic, 1.0}, Eigen::VectorXd::Zero(1), frac),
                  InvalidArgument);
  CHECK_THROWS_AS(avg_loglik(GlmModel{Family::Poisson, 1.0}, Eigen::VectorXd::Zero(1), frac),
                  InvalidArgument);
  CHECK(Dataset::to_binary01((Eigen::VectorXd(2) << -1, 1).finished())
            .isApprox((Eigen::VectorXd(2) << 0, 1).finished()));
  CHECK_THROWS_AS(Dataset::to_binary01((Eigen::VectorXd(1) << 0.3).finished()), InvalidArgument);
}
