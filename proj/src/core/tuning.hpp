#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "core/dataset.hpp"
#include "core/lqa.hpp"
#include "core/objective.hpp"
#include "core/penalty.hpp"

namespace penlik {

struct TuneOptions {
  PenaltyKind kind = PenaltyKind::Scad;
  double shape = 3.7;
  // Base-lambda grid; empty means auto (log-spaced over [1e-4,1]*lambda_max).
  std::vector<double> lambda_grid;
  int grid_size = 50;
  // Per-coordinate multiplier on the se-scaled lambda; 0 leaves a coordinate
  // unpenalized. Empty means all ones.
  Eigen::VectorXd penalty_factor;
  // Replaces se(beta_MLE) when set (tests; MLE-free scaling).
  std::optional<Eigen::VectorXd> se_override;
  LqaConfig lqa;
};

struct TuningResult {
  std::vector<double> lambda_grid;
  std::vector<double> gcv_scores;
  std::vector<double> effective_params;
  double chosen_lambda = 0.0;
  std::size_t chosen_index = 0;
  Eigen::VectorXd per_coordinate_lambda;  // at the chosen base lambda
  Eigen::VectorXd se_scale;               // se(beta_MLE) or override
  FitResult fit_at_chosen;
  std::vector<PenaltySpec> penalties_at_chosen;
};

// e(lambda) = tr[(J + n Sigma_lambda)^{-1} J] over the active set, J the
// observed information of the un-averaged objective at the fit.
double effective_params(const FitResult& fit, const PenalizedObjective& obj);

// GCV(lambda) = -l(beta_hat) / [n (1 - e/n)^2], un-averaged l.
double gcv_score(const FitResult& fit, const PenalizedObjective& obj);

// Fit at every grid point with lambda_j = lambda * se_j * factor_j and return
// the argmin of GCV. Grid points whose e(lambda) >= n score +infinity.
TuningResult gcv_select(const PenalizedObjective& obj, const TuneOptions& options);

// {nabla^2 l - n Sigma_lambda}^{-1} cov{nabla l} {...}^{-1} over the active set.
Eigen::MatrixXd sandwich_cov(const FitResult& fit, const PenalizedObjective& obj,
                             const std::vector<PenaltySpec>& penalties);

struct SubsetCriteria {
  std::vector<Eigen::Index> subset;  // covariate columns (intercept implicit)
  double rss = 0.0;
  double adjusted_r2 = 0.0;
  double gcv = 0.0;   // RSS_m / {n (1 - m/n)^2}
  double pls = 0.0;   // RSS_m/(2n) + lambda^2 m / 2
};

// Classical per-subset criteria for Gaussian data with an implicit intercept
// (m = 1 + |subset|); RSS_1 is the intercept-only (total) sum of squares.
std::vector<SubsetCriteria> classical_criteria(const Dataset& data,
                                               const std::vector<std::vector<Eigen::Index>>& subsets,
                                               double lambda);

}  // namespace penlik
