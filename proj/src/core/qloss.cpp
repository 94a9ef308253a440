#include "core/qloss.hpp"

#include <cmath>
#include <limits>

#include "core/errors.hpp"
#include "core/glm.hpp"
#include "core/rng.hpp"

namespace penlik {

namespace {

double sign_of(double m) { return m > 0.0 ? 1.0 : (m < 0.0 ? -1.0 : 0.0); }

double exp_capped(double t) { return std::exp(std::min(t, 690.0)); }

void check_pm1_labels(const Eigen::VectorXd& y) {
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y[i] != 1.0 && y[i] != -1.0)
      throw InvalidArgument("penalized ERM requires labels in {-1,+1}");
}

Eigen::VectorXd ridge_ls_init(const Dataset& data) {
  const Eigen::Index d = data.d();
  Eigen::MatrixXd gram = data.X.transpose() * data.X;
  gram.diagonal().array() += 1e-3 * static_cast<double>(data.n());
  return gram.ldlt().solve(data.X.transpose() * data.y);
}

}  // namespace

QLossKind qloss_kind_from_string(const std::string& name) {
  if (name == "misclassification" || name == "zero-one") return QLossKind::Misclassification;
  if (name == "hinge" || name == "smoothed-hinge") return QLossKind::Hinge;
  if (name == "exponential") return QLossKind::Exponential;
  if (name == "quadratic") return QLossKind::Quadratic;
  throw InvalidArgument("unknown q-loss kind: " + name);
}

std::string to_string(QLossKind kind) {
  switch (kind) {
    case QLossKind::Misclassification: return "misclassification";
    case QLossKind::Hinge: return "hinge";
    case QLossKind::Exponential: return "exponential";
    case QLossKind::Quadratic: return "quadratic";
  }
  return "?";
}

double QLoss::q(double m) const {
  switch (kind) {
    case QLossKind::Misclassification:
      return 0.5 * std::min(1.0 - m, 1.0 + m);
    case QLossKind::Hinge:
      return 0.25 * std::min(1.0 - m, 1.0 + m);
    case QLossKind::Exponential:
      if (std::abs(m) > 1.0)
        throw InvalidArgument("exponential q requires |m| <= 1");
      return std::sqrt(1.0 - m * m);
    case QLossKind::Quadratic:
      return c * m - m * m;
  }
  throw InvalidArgument("QLoss::q: unknown kind");
}

double QLoss::q_prime(double m) const {
  switch (kind) {
    case QLossKind::Misclassification:
      return -0.5 * sign_of(m);  // average of one-sided slopes at the kink
    case QLossKind::Hinge:
      return -0.25 * sign_of(m);
    case QLossKind::Exponential:
      if (std::abs(m) >= 1.0)
        throw InvalidArgument("exponential q' requires |m| < 1");
      return -m / std::sqrt(1.0 - m * m);
    case QLossKind::Quadratic:
      return c - 2.0 * m;
  }
  throw InvalidArgument("QLoss::q_prime: unknown kind");
}

double QLoss::operator()(double y, double m_hat) const {
  return q(m_hat) - q(y) - q_prime(m_hat) * (m_hat - y);
}

QLoss make_q_loss(QLossKind kind, double c) { return QLoss{kind, c}; }

double smoothed_hinge(double margin, double delta) {
  if (margin >= 1.0) return 0.0;
  if (margin > 1.0 - delta) {
    const double t = 1.0 - margin;
    return t * t / (2.0 * delta);
  }
  return 1.0 - margin - 0.5 * delta;
}

double exact_hinge_objective(const Eigen::VectorXd& beta, const Dataset& data,
                             const std::vector<PenaltySpec>& penalties) {
  const Eigen::VectorXd margins = data.y.asDiagonal() * (data.X * beta);
  double risk = 0.0;
  for (Eigen::Index i = 0; i < margins.size(); ++i) risk += std::max(1.0 - margins[i], 0.0);
  risk /= static_cast<double>(data.n());
  for (Eigen::Index j = 0; j < beta.size(); ++j)
    risk += penalty_value(penalties[j], std::abs(beta[j]));
  return risk;
}

ErmObjective::ErmObjective(QLossKind loss, Dataset data, double hinge_delta)
    : loss_(loss), data_(std::move(data)), delta_(hinge_delta) {
  check_pm1_labels(data_.y);
  if (loss_ == QLossKind::Misclassification)
    throw InvalidArgument("misclassification loss has no usable gradient; use the smoothed hinge");
  if (loss_ == QLossKind::Hinge && !(delta_ > 0.0))
    throw InvalidArgument("smoothed hinge requires delta > 0");
}

void ErmObjective::loss_derivs(double y, double u, double& value, double& d1, double& d2) const {
  switch (loss_) {
    case QLossKind::Quadratic: {
      const double r = y - u;
      value = r * r;
      d1 = -2.0 * r;
      d2 = 2.0;
      return;
    }
    case QLossKind::Exponential: {
      // m = tanh(u) turns (f12) into the AdaBoost loss exp(-y u).
      const double e = exp_capped(-y * u);
      value = e;
      d1 = -y * e;
      d2 = e;
      return;
    }
    case QLossKind::Hinge: {
      const double t = y * u;
      if (t >= 1.0) {
        value = d1 = d2 = 0.0;
      } else if (t > 1.0 - delta_) {
        value = (1.0 - t) * (1.0 - t) / (2.0 * delta_);
        d1 = -y * (1.0 - t) / delta_;
        d2 = 1.0 / delta_;
      } else {
        value = 1.0 - t - 0.5 * delta_;
        d1 = -y;
        d2 = 0.0;
      }
      return;
    }
    case QLossKind::Misclassification:
      break;
  }
  throw InvalidArgument("loss_derivs: unsupported loss");
}

double ErmObjective::avg_value(const Eigen::VectorXd& beta) const {
  if (beta.size() != data_.d()) throw InvalidArgument("erm: beta length mismatch");
  const Eigen::VectorXd u = data_.X * beta;
  double risk = 0.0, v, d1, d2;
  for (Eigen::Index i = 0; i < data_.n(); ++i) {
    loss_derivs(data_.y[i], u[i], v, d1, d2);
    risk += v;
  }
  return -risk / static_cast<double>(data_.n());
}

void ErmObjective::avg_derivatives(const Eigen::VectorXd& beta, Eigen::VectorXd& grad,
                                   Eigen::MatrixXd& hess) const {
  if (beta.size() != data_.d()) throw InvalidArgument("erm: beta length mismatch");
  const Eigen::Index n = data_.n();
  const Eigen::VectorXd u = data_.X * beta;
  Eigen::VectorXd g1(n), g2(n);
  double v, d1, d2;
  for (Eigen::Index i = 0; i < n; ++i) {
    loss_derivs(data_.y[i], u[i], v, d1, d2);
    g1[i] = d1;
    g2[i] = d2;
  }
  grad = -(data_.X.transpose() * g1) / static_cast<double>(n);
  hess = -(data_.X.transpose() * g2.asDiagonal() * data_.X) / static_cast<double>(n);
}

Eigen::MatrixXd ErmObjective::per_obs_scores(const Eigen::VectorXd& beta) const {
  const Eigen::VectorXd u = data_.X * beta;
  Eigen::VectorXd g1(data_.n());
  double v, d1, d2;
  for (Eigen::Index i = 0; i < data_.n(); ++i) {
    loss_derivs(data_.y[i], u[i], v, d1, d2);
    g1[i] = -d1;
  }
  return g1.asDiagonal() * data_.X;
}

ErmFit penalized_erm_fit(QLossKind loss, const Dataset& data,
                         const std::vector<PenaltySpec>& penalties, const ErmOptions& options) {
  check_pm1_labels(data.y);
  if (static_cast<Eigen::Index>(penalties.size()) != data.d())
    throw InvalidArgument("penalized_erm_fit: penalty list length mismatch");

  ErmFit out;
  out.exact_hinge_objective = std::numeric_limits<double>::quiet_NaN();

  switch (loss) {
    case QLossKind::Misclassification:
      throw InvalidArgument("misclassification loss has no usable gradient; use the smoothed hinge");
    case QLossKind::Quadratic: {
      // n^{-1} sum (y - x'b)^2 equals the Gaussian likelihood with sigma^2 = 1/2.
      GlmObjective obj(GlmModel{Family::Gaussian, 0.5}, Dataset(data.X, data.y));
      out.fit = lqa_fit(obj, penalties, options.lqa);
      return out;
    }
    case QLossKind::Exponential: {
      ErmObjective obj(loss, Dataset(data.X, data.y), options.hinge_delta);
      LqaConfig cfg = options.lqa;
      if (cfg.init == LqaConfig::Init::Mle && !maximize_unpenalized(obj)) {
        cfg.init = LqaConfig::Init::User;  // separable data: no finite minimizer
        cfg.user_init = ridge_ls_init(data);
      }
      out.fit = lqa_fit(obj, penalties, cfg);
      return out;
    }
    case QLossKind::Hinge: {
      // Continuation over the smoothing width; each stage warm-starts the next.
      Eigen::VectorXd start = ridge_ls_init(data);
      const double target = options.hinge_delta;
      std::vector<double> schedule;
      for (double delta = 0.25; delta > target * 1.999; delta *= 0.2) schedule.push_back(delta);
      schedule.push_back(target);
      FitResult fit;
      for (double delta : schedule) {
        ErmObjective obj(QLossKind::Hinge, Dataset(data.X, data.y), delta);
        LqaConfig cfg = options.lqa;
        cfg.init = LqaConfig::Init::User;
        cfg.user_init = start;
        fit = lqa_fit(obj, penalties, cfg);
        start = fit.beta;
      }
      out.fit = std::move(fit);
      out.exact_hinge_objective = exact_hinge_objective(out.fit.beta, data, penalties);
      return out;
    }
  }
  throw InvalidArgument("penalized_erm_fit: unknown loss");
}

GapEstimate empirical_risk_gap(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta_star,
                               QLossKind loss, const LinearGenerator& gen, int mc_n,
                               std::uint64_t seed) {
  if (mc_n < 100) throw InvalidArgument("empirical_risk_gap: mc_n must be at least 100");
  const Eigen::Index d = gen.beta.size();
  if (beta_hat.size() != d || beta_star.size() != d)
    throw InvalidArgument("empirical_risk_gap: dimension mismatch with the generator");

  // AR(rho) predictor covariance via its Cholesky factor (identity when rho=0).
  Eigen::MatrixXd chol;
  if (gen.ar_rho != 0.0) {
    Eigen::MatrixXd cov(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) cov(i, j) = std::pow(gen.ar_rho, std::abs(i - j));
    chol = cov.llt().matrixL();
  }

  const auto eval_loss = [&](double y, double u) {
    switch (loss) {
      case QLossKind::Quadratic: return (y - u) * (y - u);
      case QLossKind::Hinge: return std::max(1.0 - y * u, 0.0);
      case QLossKind::Exponential: return exp_capped(-y * u);
      case QLossKind::Misclassification: return y * u > 0.0 ? 0.0 : 1.0;
    }
    throw InvalidArgument("empirical_risk_gap: unknown loss");
  };

  Rng rng(seed);
  double sum = 0.0, sumsq = 0.0;
  Eigen::VectorXd x(d);
  for (int i = 0; i < mc_n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x[j] = rng.normal();
    if (gen.ar_rho != 0.0) x = chol * x;
    const double signal = x.dot(gen.beta) + gen.sigma * rng.normal();
    const double y = loss == QLossKind::Quadratic ? signal : (signal > 0.0 ? 1.0 : -1.0);
    const double diff = eval_loss(y, x.dot(beta_hat)) - eval_loss(y, x.dot(beta_star));
    sum += diff;
    sumsq += diff * diff;
  }
  GapEstimate est;
  est.gap = sum / mc_n;
  const double var = (sumsq - sum * sum / mc_n) / (mc_n - 1.0);
  est.std_error = std::sqrt(std::max(var, 0.0) / mc_n);
  return est;
}

}  // namespace penlik
