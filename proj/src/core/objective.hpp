#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>

namespace penlik {

// Smooth average objective n^{-1} l(beta) maximized by the LQA solver.
// Implementations: GLM log-likelihoods, Cox partial likelihood, empirical
// risks. Immutable; safe for concurrent evaluation.
class PenalizedObjective {
 public:
  virtual ~PenalizedObjective() = default;

  virtual Eigen::Index dim() const = 0;
  // The n that scales penalties/diagnostics (subjects, not failure events).
  virtual Eigen::Index n_obs() const = 0;

  // n^{-1} l(beta).
  virtual double avg_value(const Eigen::VectorXd& beta) const = 0;
  // Gradient and Hessian of avg_value.
  virtual void avg_derivatives(const Eigen::VectorXd& beta, Eigen::VectorXd& grad,
                               Eigen::MatrixXd& hess) const = 0;
  // Rows are the per-observation contributions to the un-averaged score
  // (they sum to n * grad). Used by the sandwich covariance.
  virtual Eigen::MatrixXd per_obs_scores(const Eigen::VectorXd& beta) const = 0;
};

// Unpenalized maximizer by damped Newton with ridge jitter on singular
// Hessians. Returns nullopt when iterates diverge (e.g. separated logistic).
std::optional<Eigen::VectorXd> maximize_unpenalized(const PenalizedObjective& obj,
                                                    int max_iter = 100, double tol = 1e-10);

// sqrt(diag(J^{-1})) with J the observed information of the un-averaged
// objective at beta (the MLE standard errors used for lambda scaling).
Eigen::VectorXd observed_information_se(const PenalizedObjective& obj,
                                        const Eigen::VectorXd& beta);

}  // namespace penlik
