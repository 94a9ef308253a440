#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "core/dataset.hpp"
#include "core/penalty.hpp"

namespace penlik {

// Predictors are iid rows ~ N(0, C) with C(i,j) = ar_rho^|i-j| (identity when
// ar_rho = 0). All generators are reproducible functions of the seed.
Eigen::MatrixXd generate_design(Eigen::Index n, Eigen::Index d, double ar_rho,
                                std::uint64_t seed);

Dataset generate_linear(Eigen::Index n, const Eigen::VectorXd& beta, double sigma, double ar_rho,
                        std::uint64_t seed);
Dataset generate_logistic(Eigen::Index n, const Eigen::VectorXd& beta, double ar_rho,
                          std::uint64_t seed);
Dataset generate_poisson(Eigen::Index n, const Eigen::VectorXd& beta, double ar_rho,
                         std::uint64_t seed);

// Exponential baseline hazard h0 = 1, independent exponential censoring with
// the given rate (0 disables censoring entirely).
SurvivalData generate_survival(Eigen::Index n, const Eigen::VectorXd& beta, double censor_rate,
                               double ar_rho, std::uint64_t seed);

struct OrthonormalDraw {
  Eigen::MatrixXd X;   // n x d with X'X/n = I (thin QR, scaled)
  Eigen::VectorXd y;
  Eigen::VectorXd z;   // X'y/n, the coefficient-scale observations
};
OrthonormalDraw generate_orthonormal(Eigen::Index n, Eigen::Index d, const Eigen::VectorXd& beta,
                                     double sigma, std::uint64_t seed);

struct FactorTruth {
  Eigen::MatrixXd loadings;   // d x K
  Eigen::VectorXd factor_sd;  // K
  Eigen::VectorXd sigma0;     // d idiosyncratic variances
  Eigen::MatrixXd sigma;      // implied covariance
};
FactorTruth make_factor_truth(Eigen::Index d, Eigen::Index k, double sigma0_lo, double sigma0_hi,
                              std::uint64_t seed);

struct FactorDraw {
  Eigen::MatrixXd returns;  // n x d
  Eigen::MatrixXd factors;  // n x K
};
FactorDraw generate_factor_returns(Eigen::Index n, const FactorTruth& truth, std::uint64_t seed);

struct CholeskyTruth {
  Eigen::MatrixXd phi;      // strictly lower triangular AR coefficients
  Eigen::VectorXd d_diag;   // innovation variances
  Eigen::MatrixXd sigma;    // implied covariance
};
// Banded AR truth: phi(t, t-k) = coef_k for k = 1..band.
CholeskyTruth make_banded_cholesky_truth(Eigen::Index d, int band, const Eigen::VectorXd& coefs);
Eigen::MatrixXd generate_cholesky_sample(Eigen::Index n, const CholeskyTruth& truth,
                                         std::uint64_t seed);

// Theorem-3 level sigma * sqrt(2 log(n) / n).
double universal_lambda(Eigen::Index n, double sigma);

// Componentwise thresholding of coefficient-scale observations; use_universal
// overrides the spec's lambda with the universal level.
Eigen::VectorXd fit_orthonormal(const Eigen::VectorXd& z, PenaltySpec spec, bool use_universal,
                                Eigen::Index n, double sigma);

}  // namespace penlik
