#include "core/glm.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace penlik {

namespace {

void check_dims(const Eigen::VectorXd& beta, const Dataset& data) {
  if (beta.size() != data.d())
    throw InvalidArgument("glm: beta length does not match design columns");
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// exp with the argument capped so arithmetic stays finite; only reached by
// divergent trial points during line search.
double exp_capped(double t) { return std::exp(std::min(t, 690.0)); }

}  // namespace

double log1pexp(double t) {
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

double avg_loglik(const GlmModel& model, const Eigen::VectorXd& beta, const Dataset& data) {
  check_dims(beta, data);
  data.validate_for(model.family);
  const Eigen::VectorXd eta = data.X * beta;
  const double n = static_cast<double>(data.n());
  switch (model.family) {
    case Family::Gaussian:
      return -0.5 * (data.y - eta).squaredNorm() / (model.sigma2 * n);
    case Family::Logistic: {
      double s = 0.0;
      for (Eigen::Index i = 0; i < data.n(); ++i)
        s += data.y[i] * eta[i] - log1pexp(eta[i]);
      return s / n;
    }
    case Family::Poisson: {
      double s = 0.0;
      for (Eigen::Index i = 0; i < data.n(); ++i)
        s += data.y[i] * eta[i] - exp_capped(eta[i]);
      return s / n;
    }
  }
  throw InvalidArgument("avg_loglik: unknown family");
}

void score_and_hessian(const GlmModel& model, const Eigen::VectorXd& beta, const Dataset& data,
                       Eigen::VectorXd& grad, Eigen::MatrixXd& hess) {
  check_dims(beta, data);
  const Eigen::VectorXd eta = data.X * beta;
  const double n = static_cast<double>(data.n());
  Eigen::VectorXd psi(data.n());   // d loglik_i / d eta_i
  Eigen::VectorXd w(data.n());     // -d^2 loglik_i / d eta_i^2
  switch (model.family) {
    case Family::Gaussian:
      psi = (data.y - eta) / model.sigma2;
      w.setConstant(1.0 / model.sigma2);
      break;
    case Family::Logistic:
      for (Eigen::Index i = 0; i < data.n(); ++i) {
        const double p = sigmoid(eta[i]);
        psi[i] = data.y[i] - p;
        w[i] = p * (1.0 - p);
      }
      break;
    case Family::Poisson:
      for (Eigen::Index i = 0; i < data.n(); ++i) {
        const double mu = exp_capped(eta[i]);
        psi[i] = data.y[i] - mu;
        w[i] = mu;
      }
      break;
  }
  grad = data.X.transpose() * psi / n;
  hess = -(data.X.transpose() * w.asDiagonal() * data.X) / n;
}

GlmObjective::GlmObjective(GlmModel model, Dataset data)
    : model_(model), data_(std::move(data)) {
  data_.validate_for(model_.family);
  if (model_.family == Family::Gaussian) {
    xtx_ = data_.X.transpose() * data_.X;
    xty_ = data_.X.transpose() * data_.y;
    yty_ = data_.y.squaredNorm();
  }
}

double GlmObjective::avg_value(const Eigen::VectorXd& beta) const {
  if (model_.family == Family::Gaussian) {
    check_dims(beta, data_);
    const double rss = yty_ - 2.0 * xty_.dot(beta) + beta.dot(xtx_ * beta);
    return -0.5 * rss / (model_.sigma2 * static_cast<double>(data_.n()));
  }
  return avg_loglik(model_, beta, data_);
}

void GlmObjective::avg_derivatives(const Eigen::VectorXd& beta, Eigen::VectorXd& grad,
                                   Eigen::MatrixXd& hess) const {
  if (model_.family == Family::Gaussian) {
    check_dims(beta, data_);
    const double n = static_cast<double>(data_.n());
    grad = (xty_ - xtx_ * beta) / (model_.sigma2 * n);
    hess = -xtx_ / (model_.sigma2 * n);
    return;
  }
  score_and_hessian(model_, beta, data_, grad, hess);
}

Eigen::MatrixXd GlmObjective::per_obs_scores(const Eigen::VectorXd& beta) const {
  check_dims(beta, data_);
  const Eigen::VectorXd eta = data_.X * beta;
  Eigen::VectorXd psi(data_.n());
  switch (model_.family) {
    case Family::Gaussian:
      psi = (data_.y - eta) / model_.sigma2;
      break;
    case Family::Logistic:
      for (Eigen::Index i = 0; i < data_.n(); ++i) psi[i] = data_.y[i] - sigmoid(eta[i]);
      break;
    case Family::Poisson:
      for (Eigen::Index i = 0; i < data_.n(); ++i) psi[i] = data_.y[i] - exp_capped(eta[i]);
      break;
  }
  return psi.asDiagonal() * data_.X;
}

}  // namespace penlik
