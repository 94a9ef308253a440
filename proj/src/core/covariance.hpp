#pragma once

#include <Eigen/Dense>
#include <vector>

#include "core/penalty.hpp"
#include "core/tuning.hpp"

namespace penlik {

// Modified Cholesky parametrization L Sigma L' = D with unit lower-triangular
// L, L(t,j) = -phi(t,j) off the diagonal.
struct CholeskyCov {
  Eigen::MatrixXd phi;      // strictly lower triangular
  Eigen::VectorXd d_diag;   // innovation variances sigma_t^2
  Eigen::MatrixXd sigma;
  Eigen::MatrixXd precision;
  std::vector<Eigen::Index> column_order;  // ordering the rows were fit under
  std::vector<double> row_lambdas;         // chosen base lambda per row (0 for row 1)
};

struct CholeskyOptions {
  PenaltyKind kind = PenaltyKind::Scad;
  double shape = 3.7;
  bool use_gcv = true;
  double fixed_lambda = 0.0;  // used when use_gcv is false
  int grid_size = 25;
  LqaConfig lqa;
};

// Per-row penalized autoregressions of the centered columns of W; innovation
// variances are n-divisor mean squared residuals so the lambda = 0 path
// reproduces the n-divisor sample covariance exactly.
CholeskyCov cholesky_select(const Eigen::MatrixXd& w, const CholeskyOptions& options = {});

// Assemble sigma = L^{-1} D L^{-T} and precision = L' D^{-1} L from (phi, D).
void reconstruct_cholesky(CholeskyCov& cov);

struct FactorCov {
  Eigen::MatrixXd loadings;   // d x K
  Eigen::MatrixXd cov_f;      // K x K sample covariance of the factors
  Eigen::VectorXd sigma0;     // diagonal idiosyncratic variances
  Eigen::MatrixXd sigma;      // B cov_f B' + diag(sigma0)
};

// Per-asset OLS of returns on the factor matrix (no intercept, per the
// K-factor model); residual variances use the n divisor.
FactorCov factor_cov(const Eigen::MatrixXd& returns, const Eigen::MatrixXd& factors);

struct EstimatorComparison {
  double max_eigenvalue_dev = 0.0;  // max_k |lambda_k(S_hat) - lambda_k(S)|
  double portfolio_risk_err = 0.0;  // |xi' S_hat xi - xi' S xi|
  double precision_metric = 0.0;    // tr(S^{-1/2} S_hat S^{-1/2} - I)^2 / d
  double inverse_frobenius = 0.0;   // ||S_hat^{-1} - S^{-1}||_F
};

std::vector<EstimatorComparison> compare_estimators(const Eigen::MatrixXd& sigma_true,
                                                    const std::vector<Eigen::MatrixXd>& estimates,
                                                    const Eigen::VectorXd& xi);

// Centered n-divisor sample covariance.
Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& w);

}  // namespace penlik
