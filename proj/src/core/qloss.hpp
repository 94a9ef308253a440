#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "core/dataset.hpp"
#include "core/lqa.hpp"
#include "core/objective.hpp"
#include "core/penalty.hpp"

namespace penlik {

enum class QLossKind { Misclassification, Hinge, Exponential, Quadratic };

QLossKind qloss_kind_from_string(const std::string& name);
std::string to_string(QLossKind kind);

// Loss generated from a concave q: l(y, m) = q(m) - q(y) - q'(m)(m - y).
// At kinks of q the subderivative is the average of the one-sided slopes.
struct QLoss {
  QLossKind kind = QLossKind::Quadratic;
  double c = 1.0;  // linear coefficient of the quadratic q (cancels in l)

  double q(double m) const;
  double q_prime(double m) const;
  double operator()(double y, double m_hat) const;
};

QLoss make_q_loss(QLossKind kind, double c = 1.0);

struct ErmOptions {
  // Huber smoothing width for the hinge kink.
  double hinge_delta = 1e-3;
  LqaConfig lqa;
};

struct ErmFit {
  FitResult fit;
  // Exact (unsmoothed) empirical hinge objective at the solution, reported
  // alongside smoothed-hinge fits; NaN otherwise.
  double exact_hinge_objective = 0.0;
};

// Minimize n^{-1} sum_i l(g(x_i' beta), y_i) + sum_j p_{lambda_j}(|beta_j|)
// over +-1-labeled data. Quadratic delegates to the Gaussian LQA path;
// Exponential squashes the linear predictor through tanh; the hinge is
// optimized through its Huber-smoothed surrogate.
ErmFit penalized_erm_fit(QLossKind loss, const Dataset& data,
                         const std::vector<PenaltySpec>& penalties, const ErmOptions& options = {});

// Smoothed hinge H_delta(t): 0 for t >= 1, (1-t)^2/(2 delta) on the band,
// 1 - t - delta/2 below it. Converges monotonically up to (1-t)_+ as delta->0.
double smoothed_hinge(double margin, double delta);
double exact_hinge_objective(const Eigen::VectorXd& beta, const Dataset& data,
                             const std::vector<PenaltySpec>& penalties);

// Empirical risk objective for the smooth q-losses; used by the solver and
// exposed for tests.
class ErmObjective final : public PenalizedObjective {
 public:
  ErmObjective(QLossKind loss, Dataset data, double hinge_delta);

  Eigen::Index dim() const override { return data_.d(); }
  Eigen::Index n_obs() const override { return data_.n(); }
  double avg_value(const Eigen::VectorXd& beta) const override;
  void avg_derivatives(const Eigen::VectorXd& beta, Eigen::VectorXd& grad,
                       Eigen::MatrixXd& hess) const override;
  Eigen::MatrixXd per_obs_scores(const Eigen::VectorXd& beta) const override;

 private:
  // Per-observation loss and derivatives in the linear predictor u.
  void loss_derivs(double y, double u, double& value, double& d1, double& d2) const;

  QLossKind loss_;
  Dataset data_;
  double delta_;
};

struct GapEstimate {
  double gap = 0.0;
  double std_error = 0.0;
};

struct LinearGenerator {
  Eigen::VectorXd beta;   // true coefficients
  double sigma = 1.0;     // Gaussian noise scale
  double ar_rho = 0.0;    // AR(rho) covariance between predictors
};

// Monte Carlo estimate of E l(g(X'bhat), Y) - E l(g(X'bstar), Y) under the
// linear generator, paired draws. mc_n < 100 is refused.
GapEstimate empirical_risk_gap(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta_star,
                               QLossKind loss, const LinearGenerator& gen, int mc_n,
                               std::uint64_t seed);

}  // namespace penlik
