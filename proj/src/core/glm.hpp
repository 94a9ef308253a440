#pragma once

#include <Eigen/Dense>

#include "core/dataset.hpp"
#include "core/objective.hpp"

namespace penlik {

// Family with its canonical link fixed: identity, logit, log.
struct GlmModel {
  Family family = Family::Gaussian;
  // Gaussian nuisance variance, fixed (not estimated).
  double sigma2 = 1.0;
};

// n^{-1} sum_i log f(g(x_i' beta), y_i), constants in y dropped.
double avg_loglik(const GlmModel& model, const Eigen::VectorXd& beta, const Dataset& data);

// Gradient and Hessian of avg_loglik; Hessian symmetric negative semidefinite.
void score_and_hessian(const GlmModel& model, const Eigen::VectorXd& beta, const Dataset& data,
                       Eigen::VectorXd& grad, Eigen::MatrixXd& hess);

// log(1 + exp(t)) without overflow.
double log1pexp(double t);

class GlmObjective final : public PenalizedObjective {
 public:
  GlmObjective(GlmModel model, Dataset data);

  Eigen::Index dim() const override { return data_.d(); }
  Eigen::Index n_obs() const override { return data_.n(); }
  double avg_value(const Eigen::VectorXd& beta) const override;
  void avg_derivatives(const Eigen::VectorXd& beta, Eigen::VectorXd& grad,
                       Eigen::MatrixXd& hess) const override;
  Eigen::MatrixXd per_obs_scores(const Eigen::VectorXd& beta) const override;

  const GlmModel& model() const { return model_; }
  const Dataset& data() const { return data_; }

 private:
  GlmModel model_;
  Dataset data_;
  // Gaussian fast path: the Hessian is constant.
  Eigen::MatrixXd xtx_;
  Eigen::VectorXd xty_;
  double yty_ = 0.0;
};

}  // namespace penlik
