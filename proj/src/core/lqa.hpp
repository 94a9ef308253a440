#pragma once

#include <Eigen/Dense>
#include <vector>

#include "core/objective.hpp"
#include "core/penalty.hpp"

namespace penlik {

struct LqaConfig {
  enum class Init { Mle, Zeros, User };

  double tol = 1e-8;
  int max_iter = 200;
  // Zero-clamp threshold; 0 means 1e-6 * max|initial coefficient|.
  double clamp_tau = 0.0;
  Init init = Init::Mle;
  Eigen::VectorXd user_init;
  int max_halvings = 30;
  // Entropy (L0) fits enumerate subsets exhaustively up to this dimension.
  int entropy_exhaustive_limit = 15;
};

struct FitResult {
  Eigen::VectorXd beta;
  std::vector<Eigen::Index> active_set;  // indices with nonzero beta
  double objective = 0.0;                // final penalized average objective
  int iterations = 0;
  bool converged = false;
  // diag Sigma_lambda = p'(|b_j|)/|b_j| at convergence; clamped coordinates
  // are removed from the working system, so their entries are 0.
  Eigen::VectorXd sigma_lambda;
  // Working penalized objective after each accepted step (nondecreasing).
  std::vector<double> objective_trace;
};

// Maximize n^{-1} l(beta) - sum_j p_{lambda_j}(|beta_j|) by local quadratic
// approximation with per-iteration penalty updates and permanent zero-clamps.
// A coordinate may carry lambda = 0 (unpenalized). Entropy penalties take an
// exact enumeration route (or coordinate-wise L0 descent for Gaussian fits
// above the enumeration limit) since their LQA weight is identically zero.
FitResult lqa_fit(const PenalizedObjective& obj, const std::vector<PenaltySpec>& penalties,
                  const LqaConfig& config = {});

// d l/d beta_j - n p'(|b_j|) sgn(b_j) over the active set (the penalized
// likelihood equation; zero at interior stationary points).
Eigen::VectorXd stationarity_residual(const FitResult& fit, const PenalizedObjective& obj,
                                      const std::vector<PenaltySpec>& penalties);
double stationarity_max_norm(const FitResult& fit, const PenalizedObjective& obj,
                             const std::vector<PenaltySpec>& penalties);

struct PenaltyDiagnostics {
  double a_n = 0.0;  // max p'(|b_j|) over nonzero b_j
  double b_n = 0.0;  // max |p''(|b_j|)| over nonzero b_j (central differences)
};

PenaltyDiagnostics penalty_diagnostics(const std::vector<PenaltySpec>& penalties,
                                       const Eigen::VectorXd& beta);

// Restricted unpenalized maximizer: coordinates outside `support` pinned at 0.
Eigen::VectorXd maximize_on_support(const PenalizedObjective& obj,
                                    const std::vector<Eigen::Index>& support, double tol = 1e-12,
                                    int max_iter = 100);

}  // namespace penlik
