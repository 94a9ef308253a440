#include "core/simulate.hpp"

#include <cmath>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace penlik {

Eigen::MatrixXd generate_design(Eigen::Index n, Eigen::Index d, double ar_rho,
                                std::uint64_t seed) {
  if (n < 1 || d < 1) throw InvalidArgument("generate_design: need n >= 1 and d >= 1");
  if (std::abs(ar_rho) >= 1.0) throw InvalidArgument("generate_design: |ar_rho| must be < 1");
  Rng rng(seed);
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = rng.normal();
  if (ar_rho != 0.0) {
    Eigen::MatrixXd cov(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) cov(i, j) = std::pow(ar_rho, std::abs(i - j));
    const Eigen::MatrixXd chol = cov.llt().matrixL();
    x = x * chol.transpose();
  }
  return x;
}

Dataset generate_linear(Eigen::Index n, const Eigen::VectorXd& beta, double sigma, double ar_rho,
                        std::uint64_t seed) {
  if (sigma < 0.0) throw InvalidArgument("generate_linear: sigma must be >= 0");
  Eigen::MatrixXd x = generate_design(n, beta.size(), ar_rho, seed);
  Rng rng(derive_seed(seed, 1));
  Eigen::VectorXd y = x * beta;
  if (sigma > 0.0)
    for (Eigen::Index i = 0; i < n; ++i) y[i] += sigma * rng.normal();
  return Dataset(std::move(x), std::move(y));
}

Dataset generate_logistic(Eigen::Index n, const Eigen::VectorXd& beta, double ar_rho,
                          std::uint64_t seed) {
  Eigen::MatrixXd x = generate_design(n, beta.size(), ar_rho, seed);
  Rng rng(derive_seed(seed, 1));
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double eta = x.row(i).dot(beta);
    const double p = 1.0 / (1.0 + std::exp(-eta));
    y[i] = rng.bernoulli(p);
  }
  return Dataset(std::move(x), std::move(y));
}

Dataset generate_poisson(Eigen::Index n, const Eigen::VectorXd& beta, double ar_rho,
                         std::uint64_t seed) {
  Eigen::MatrixXd x = generate_design(n, beta.size(), ar_rho, seed);
  Rng rng(derive_seed(seed, 1));
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mu = std::exp(std::min(x.row(i).dot(beta), 30.0));
    y[i] = static_cast<double>(rng.poisson(mu));
  }
  return Dataset(std::move(x), std::move(y));
}

SurvivalData generate_survival(Eigen::Index n, const Eigen::VectorXd& beta, double censor_rate,
                               double ar_rho, std::uint64_t seed) {
  if (censor_rate < 0.0) throw InvalidArgument("generate_survival: censor_rate must be >= 0");
  Eigen::MatrixXd x = generate_design(n, beta.size(), ar_rho, seed);
  Rng rng(derive_seed(seed, 1));
  Eigen::VectorXd time(n);
  Eigen::VectorXi status(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double hazard = std::exp(std::min(x.row(i).dot(beta), 30.0));
    const double t = rng.exponential(hazard);
    if (censor_rate > 0.0) {
      const double c = rng.exponential(censor_rate);
      time[i] = std::min(t, c);
      status[i] = t <= c ? 1 : 0;
    } else {
      time[i] = t;
      status[i] = 1;
    }
  }
  return SurvivalData(std::move(x), std::move(time), std::move(status));
}

OrthonormalDraw generate_orthonormal(Eigen::Index n, Eigen::Index d, const Eigen::VectorXd& beta,
                                     double sigma, std::uint64_t seed) {
  if (d > n) throw InvalidArgument("generate_orthonormal: need d <= n");
  if (beta.size() != d) throw InvalidArgument("generate_orthonormal: beta length mismatch");
  Eigen::MatrixXd raw = generate_design(n, d, 0.0, seed);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, d);
  OrthonormalDraw draw;
  draw.X = std::sqrt(static_cast<double>(n)) * q;
  Rng rng(derive_seed(seed, 1));
  draw.y = draw.X * beta;
  if (sigma > 0.0)
    for (Eigen::Index i = 0; i < n; ++i) draw.y[i] += sigma * rng.normal();
  draw.z = draw.X.transpose() * draw.y / static_cast<double>(n);
  return draw;
}

FactorTruth make_factor_truth(Eigen::Index d, Eigen::Index k, double sigma0_lo, double sigma0_hi,
                              std::uint64_t seed) {
  if (k < 1 || d < 1) throw InvalidArgument("make_factor_truth: need d >= 1 and K >= 1");
  Rng rng(seed);
  FactorTruth truth;
  truth.loadings.resize(d, k);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < k; ++j) truth.loadings(i, j) = rng.normal(0.0, 1.0);
  truth.factor_sd.resize(k);
  for (Eigen::Index j = 0; j < k; ++j)
    truth.factor_sd[j] = 1.0 / std::sqrt(static_cast<double>(j + 1));
  truth.sigma0.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) truth.sigma0[i] = rng.uniform(sigma0_lo, sigma0_hi);
  truth.sigma = truth.loadings * truth.factor_sd.cwiseAbs2().asDiagonal() *
                truth.loadings.transpose();
  truth.sigma.diagonal() += truth.sigma0;
  return truth;
}

FactorDraw generate_factor_returns(Eigen::Index n, const FactorTruth& truth, std::uint64_t seed) {
  const Eigen::Index d = truth.loadings.rows();
  const Eigen::Index k = truth.loadings.cols();
  Rng rng(seed);
  FactorDraw draw;
  draw.factors.resize(n, k);
  for (Eigen::Index t = 0; t < n; ++t)
    for (Eigen::Index j = 0; j < k; ++j) draw.factors(t, j) = rng.normal(0.0, truth.factor_sd[j]);
  draw.returns = draw.factors * truth.loadings.transpose();
  for (Eigen::Index t = 0; t < n; ++t)
    for (Eigen::Index i = 0; i < d; ++i)
      draw.returns(t, i) += rng.normal(0.0, std::sqrt(truth.sigma0[i]));
  return draw;
}

CholeskyTruth make_banded_cholesky_truth(Eigen::Index d, int band, const Eigen::VectorXd& coefs) {
  if (band < 0 || coefs.size() < band)
    throw InvalidArgument("make_banded_cholesky_truth: need a coefficient per band");
  CholeskyTruth truth;
  truth.phi = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index t = 1; t < d; ++t)
    for (int k = 1; k <= band && t - k >= 0; ++k) truth.phi(t, t - k) = coefs[k - 1];
  truth.d_diag = Eigen::VectorXd::Ones(d);
  Eigen::MatrixXd ell = Eigen::MatrixXd::Identity(d, d);
  for (Eigen::Index t = 1; t < d; ++t)
    for (Eigen::Index j = 0; j < t; ++j) ell(t, j) = -truth.phi(t, j);
  const Eigen::MatrixXd linv =
      ell.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(d, d));
  truth.sigma = linv * truth.d_diag.asDiagonal() * linv.transpose();
  return truth;
}

Eigen::MatrixXd generate_cholesky_sample(Eigen::Index n, const CholeskyTruth& truth,
                                         std::uint64_t seed) {
  const Eigen::Index d = truth.phi.rows();
  Rng rng(seed);
  Eigen::MatrixXd w(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index t = 0; t < d; ++t) {
      double v = rng.normal(0.0, std::sqrt(truth.d_diag[t]));
      for (Eigen::Index j = 0; j < t; ++j) v += truth.phi(t, j) * w(i, j);
      w(i, t) = v;
    }
  }
  return w;
}

double universal_lambda(Eigen::Index n, double sigma) {
  if (n < 2) throw InvalidArgument("universal_lambda: need n >= 2");
  if (sigma <= 0.0) throw InvalidArgument("universal_lambda: sigma must be > 0");
  const double nd = static_cast<double>(n);
  return sigma * std::sqrt(2.0 * std::log(nd) / nd);
}

Eigen::VectorXd fit_orthonormal(const Eigen::VectorXd& z, PenaltySpec spec, bool use_universal,
                                Eigen::Index n, double sigma) {
  if (!z.allFinite()) throw InvalidArgument("fit_orthonormal: z must be finite");
  if (use_universal) spec.lambda = universal_lambda(n, sigma);
  Eigen::VectorXd out(z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) out[j] = threshold(spec, z[j]);
  return out;
}

}  // namespace penlik
