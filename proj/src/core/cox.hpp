#pragma once

#include <Eigen/Dense>
#include <vector>

#include "core/dataset.hpp"
#include "core/objective.hpp"

namespace penlik {

// Failure events ordered by time with their risk sets R_j = {i : Z_i >= t_j}.
// Ties carry the full tied group in every tied event's risk set (Breslow).
struct RiskSetIndex {
  std::vector<double> failure_times;        // ordered, one entry per failure event
  std::vector<Eigen::Index> failure_index;  // subject failing at event j
  std::vector<std::vector<Eigen::Index>> risk_sets;
};

RiskSetIndex build_risk_sets(const SurvivalData& data);

// sum_j [ x_(j)' beta - log sum_{i in R_j} exp(x_i' beta) ], Breslow ties.
double partial_loglik(const Eigen::VectorXd& beta, const SurvivalData& data);
void partial_loglik_derivatives(const Eigen::VectorXd& beta, const SurvivalData& data,
                                Eigen::VectorXd& grad, Eigen::MatrixXd& hess);

class CoxObjective final : public PenalizedObjective {
 public:
  explicit CoxObjective(SurvivalData data);

  Eigen::Index dim() const override { return data_.d(); }
  Eigen::Index n_obs() const override { return data_.n(); }
  // n^{-1} * partial log-likelihood, sharing the solver code path with (c1).
  double avg_value(const Eigen::VectorXd& beta) const override;
  void avg_derivatives(const Eigen::VectorXd& beta, Eigen::VectorXd& grad,
                       Eigen::MatrixXd& hess) const override;
  // Per-failure-event score terms x_(j) - xbar_j.
  Eigen::MatrixXd per_obs_scores(const Eigen::VectorXd& beta) const override;

  const SurvivalData& data() const { return data_; }

 private:
  SurvivalData data_;
  std::vector<Eigen::Index> order_;   // subjects sorted by ascending time
  std::vector<Eigen::Index> events_;  // positions (in order_) of failures, ascending time
  std::vector<Eigen::Index> risk_start_;  // first position in order_ with Z >= event time
};

}  // namespace penlik
