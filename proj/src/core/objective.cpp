#include "core/objective.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace penlik {

std::optional<Eigen::VectorXd> maximize_unpenalized(const PenalizedObjective& obj, int max_iter,
                                                    double tol) {
  const Eigen::Index d = obj.dim();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
  double value = obj.avg_value(beta);
  Eigen::VectorXd grad(d);
  Eigen::MatrixXd hess(d, d);
  for (int iter = 0; iter < max_iter; ++iter) {
    obj.avg_derivatives(beta, grad, hess);
    Eigen::MatrixXd neg_hess = -hess;
    double jitter = 0.0;
    Eigen::VectorXd step;
    for (;;) {
      Eigen::LDLT<Eigen::MatrixXd> ldlt(neg_hess);
      if (ldlt.info() == Eigen::Success) {
        step = ldlt.solve(grad);
        if (step.allFinite() && grad.dot(step) >= 0.0) break;
      }
      jitter = jitter == 0.0 ? 1e-10 * (1.0 + neg_hess.trace() / d) : jitter * 10.0;
      if (jitter > 1e6) return std::nullopt;
      neg_hess = -hess + jitter * Eigen::MatrixXd::Identity(d, d);
    }
    double t = 1.0;
    Eigen::VectorXd cand = beta + step;
    double cand_value = obj.avg_value(cand);
    int halvings = 0;
    while ((!std::isfinite(cand_value) || cand_value < value - 1e-14) && halvings < 60) {
      t *= 0.5;
      cand = beta + t * step;
      cand_value = obj.avg_value(cand);
      ++halvings;
    }
    if (!std::isfinite(cand_value)) return std::nullopt;
    const double change = (cand - beta).cwiseAbs().maxCoeff();
    beta = cand;
    value = cand_value;
    // Diverging iterates (separated logistic data): no finite maximizer.
    if (beta.cwiseAbs().maxCoeff() > 1e8) return std::nullopt;
    if (change <= tol && grad.cwiseAbs().maxCoeff() <= std::sqrt(tol)) return beta;
  }
  Eigen::VectorXd g(d);
  Eigen::MatrixXd h(d, d);
  obj.avg_derivatives(beta, g, h);
  if (g.cwiseAbs().maxCoeff() <= 1e-5) return beta;
  return std::nullopt;
}

Eigen::VectorXd observed_information_se(const PenalizedObjective& obj,
                                        const Eigen::VectorXd& beta) {
  const Eigen::Index d = obj.dim();
  Eigen::VectorXd grad(d);
  Eigen::MatrixXd hess(d, d);
  obj.avg_derivatives(beta, grad, hess);
  const Eigen::MatrixXd info = -static_cast<double>(obj.n_obs()) * hess;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
  if (ldlt.info() != Eigen::Success)
    throw NumericalError("observed information is singular; cannot form standard errors");
  const Eigen::MatrixXd inv = ldlt.solve(Eigen::MatrixXd::Identity(d, d));
  Eigen::VectorXd se(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double v = inv(j, j);
    if (!(v > 0.0) || !std::isfinite(v))
      throw NumericalError("observed information is not positive definite");
    se[j] = std::sqrt(v);
  }
  return se;
}

}  // namespace penlik
