#include "core/covariance.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "core/errors.hpp"
#include "core/glm.hpp"

namespace penlik {

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& w) {
  const double n = static_cast<double>(w.rows());
  const Eigen::RowVectorXd mean = w.colwise().mean();
  const Eigen::MatrixXd centered = w.rowwise() - mean;
  return centered.transpose() * centered / n;
}

void reconstruct_cholesky(CholeskyCov& cov) {
  const Eigen::Index d = cov.phi.rows();
  Eigen::MatrixXd ell = Eigen::MatrixXd::Identity(d, d);
  for (Eigen::Index t = 1; t < d; ++t)
    for (Eigen::Index j = 0; j < t; ++j) ell(t, j) = -cov.phi(t, j);
  // L Sigma L' = D  =>  Sigma = L^{-1} D L^{-T}
  const Eigen::MatrixXd linv =
      ell.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(d, d));
  cov.sigma = linv * cov.d_diag.asDiagonal() * linv.transpose();
  cov.sigma = 0.5 * (cov.sigma + cov.sigma.transpose().eval());
  cov.precision = ell.transpose() * cov.d_diag.cwiseInverse().asDiagonal() * ell;
  cov.precision = 0.5 * (cov.precision + cov.precision.transpose().eval());
}

CholeskyCov cholesky_select(const Eigen::MatrixXd& w, const CholeskyOptions& options) {
  const Eigen::Index n = w.rows();
  const Eigen::Index d = w.cols();
  if (n < 3) throw InvalidArgument("cholesky_select: need n >= 3");
  if (d < 1) throw InvalidArgument("cholesky_select: need d >= 1");
  if (!w.allFinite()) throw InvalidArgument("cholesky_select: NaN/Inf entries");

  const Eigen::RowVectorXd mean = w.colwise().mean();
  const Eigen::MatrixXd centered = w.rowwise() - mean;
  const double nd = static_cast<double>(n);

  CholeskyCov cov;
  cov.phi = Eigen::MatrixXd::Zero(d, d);
  cov.d_diag = Eigen::VectorXd::Zero(d);
  cov.column_order.resize(static_cast<std::size_t>(d));
  std::iota(cov.column_order.begin(), cov.column_order.end(), Eigen::Index{0});
  cov.row_lambdas.assign(static_cast<std::size_t>(d), 0.0);

  cov.d_diag[0] = centered.col(0).squaredNorm() / nd;
  if (d == 1) {
    cov.sigma = cov.d_diag.asDiagonal();
    cov.precision = cov.d_diag.cwiseInverse().asDiagonal();
    return cov;
  }

  for (Eigen::Index t = 1; t < d; ++t) {
    Dataset row_data(centered.leftCols(t), centered.col(t));
    GlmObjective obj(GlmModel{Family::Gaussian, 1.0}, std::move(row_data));
    Eigen::VectorXd coef;
    try {
      if (options.use_gcv) {
        TuneOptions tune;
        tune.kind = options.kind;
        tune.shape = options.shape;
        tune.grid_size = options.grid_size;
        tune.lqa = options.lqa;
        const TuningResult tuned = gcv_select(obj, tune);
        coef = tuned.fit_at_chosen.beta;
        cov.row_lambdas[static_cast<std::size_t>(t)] = tuned.chosen_lambda;
      } else if (options.fixed_lambda == 0.0) {
        std::vector<Eigen::Index> all(static_cast<std::size_t>(t));
        std::iota(all.begin(), all.end(), Eigen::Index{0});
        coef = maximize_on_support(obj, all);
      } else {
        std::vector<PenaltySpec> penalties(
            static_cast<std::size_t>(t),
            PenaltySpec{options.kind, options.fixed_lambda, options.shape});
        coef = lqa_fit(obj, penalties, options.lqa).beta;
        cov.row_lambdas[static_cast<std::size_t>(t)] = options.fixed_lambda;
      }
    } catch (const std::exception& e) {
      throw NumericalError("cholesky_select: row " + std::to_string(t + 1) +
                           " regression failed: " + e.what());
    }
    cov.phi.row(t).head(t) = coef.transpose();
    cov.d_diag[t] = (centered.col(t) - centered.leftCols(t) * coef).squaredNorm() / nd;
    if (!(cov.d_diag[t] > 0.0))
      throw NumericalError("cholesky_select: nonpositive innovation variance at row " +
                           std::to_string(t + 1));
  }
  reconstruct_cholesky(cov);
  return cov;
}

FactorCov factor_cov(const Eigen::MatrixXd& returns, const Eigen::MatrixXd& factors) {
  const Eigen::Index n = returns.rows();
  const Eigen::Index d = returns.cols();
  const Eigen::Index k = factors.cols();
  if (factors.rows() != n) throw InvalidArgument("factor_cov: row mismatch");
  if (n <= k + 1) throw InvalidArgument("factor_cov: need n > K + 1");
  if (!returns.allFinite() || !factors.allFinite())
    throw InvalidArgument("factor_cov: NaN/Inf entries");

  const Eigen::MatrixXd gram = factors.transpose() * factors;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  if (!lu.isInvertible()) throw InvalidArgument("factor_cov: factor matrix is rank deficient");

  FactorCov out;
  out.loadings.resize(d, k);
  out.sigma0.resize(d);
  const Eigen::MatrixXd coefs = lu.solve(factors.transpose() * returns);  // k x d
  for (Eigen::Index i = 0; i < d; ++i) {
    out.loadings.row(i) = coefs.col(i).transpose();
    out.sigma0[i] = (returns.col(i) - factors * coefs.col(i)).squaredNorm() /
                    static_cast<double>(n);
  }
  out.cov_f = sample_covariance(factors);
  out.sigma = out.loadings * out.cov_f * out.loadings.transpose();
  out.sigma.diagonal() += out.sigma0;
  out.sigma = 0.5 * (out.sigma + out.sigma.transpose().eval());
  return out;
}

std::vector<EstimatorComparison> compare_estimators(const Eigen::MatrixXd& sigma_true,
                                                    const std::vector<Eigen::MatrixXd>& estimates,
                                                    const Eigen::VectorXd& xi) {
  const Eigen::Index d = sigma_true.rows();
  if (sigma_true.cols() != d) throw InvalidArgument("compare_estimators: sigma_true not square");
  if (xi.size() != d) throw InvalidArgument("compare_estimators: xi length mismatch");
  if (std::abs(xi.sum() - 1.0) > 1e-8)
    throw InvalidArgument("compare_estimators: portfolio weights must sum to 1");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> true_eig(sigma_true);
  if (true_eig.info() != Eigen::Success)
    throw NumericalError("compare_estimators: eigendecomposition failed");
  if (true_eig.eigenvalues().minCoeff() < -1e-10 * std::abs(true_eig.eigenvalues().maxCoeff()))
    throw InvalidArgument("compare_estimators: sigma_true is not positive semidefinite");
  if (true_eig.eigenvalues().minCoeff() <= 0.0)
    throw InvalidArgument("compare_estimators: sigma_true must be positive definite");

  const Eigen::MatrixXd inv_sqrt = true_eig.operatorInverseSqrt();
  const Eigen::MatrixXd true_inv = inv_sqrt * inv_sqrt;
  const double true_risk = xi.dot(sigma_true * xi);
  Eigen::VectorXd true_vals = true_eig.eigenvalues().reverse();

  std::vector<EstimatorComparison> out;
  for (const auto& est : estimates) {
    if (est.rows() != d || est.cols() != d)
      throw InvalidArgument("compare_estimators: estimate dimension mismatch");
    EstimatorComparison cmp;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(est);
    const Eigen::VectorXd vals = eig.eigenvalues().reverse();
    cmp.max_eigenvalue_dev = (vals - true_vals).cwiseAbs().maxCoeff();
    cmp.portfolio_risk_err = std::abs(xi.dot(est * xi) - true_risk);
    const Eigen::MatrixXd standardized =
        inv_sqrt * est * inv_sqrt - Eigen::MatrixXd::Identity(d, d);
    cmp.precision_metric = standardized.squaredNorm() / static_cast<double>(d);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(est);
    cmp.inverse_frobenius = lu.isInvertible()
                                ? (lu.inverse() - true_inv).norm()
                                : std::numeric_limits<double>::infinity();
    out.push_back(cmp);
  }
  return out;
}

}  // namespace penlik
