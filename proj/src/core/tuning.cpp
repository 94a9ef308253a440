#include "core/tuning.hpp"

#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace penlik {

namespace {

Eigen::MatrixXd active_information(const FitResult& fit, const PenalizedObjective& obj) {
  const double n = static_cast<double>(obj.n_obs());
  Eigen::VectorXd grad(obj.dim());
  Eigen::MatrixXd hess(obj.dim(), obj.dim());
  obj.avg_derivatives(fit.beta, grad, hess);
  const auto k = static_cast<Eigen::Index>(fit.active_set.size());
  Eigen::MatrixXd info(k, k);
  for (Eigen::Index r = 0; r < k; ++r)
    for (Eigen::Index c = 0; c < k; ++c)
      info(r, c) = -n * hess(fit.active_set[r], fit.active_set[c]);
  return info;
}

}  // namespace

double effective_params(const FitResult& fit, const PenalizedObjective& obj) {
  if (fit.active_set.empty()) return 0.0;
  const double n = static_cast<double>(obj.n_obs());
  const Eigen::MatrixXd info = active_information(fit, obj);
  const auto k = static_cast<Eigen::Index>(fit.active_set.size());
  Eigen::MatrixXd bracket = info;
  for (Eigen::Index r = 0; r < k; ++r) bracket(r, r) += n * fit.sigma_lambda[fit.active_set[r]];
  Eigen::LDLT<Eigen::MatrixXd> ldlt(bracket);
  if (ldlt.info() != Eigen::Success)
    throw NumericalError("effective_params: singular information-plus-penalty matrix");
  const Eigen::MatrixXd smoother = ldlt.solve(info);
  if (!smoother.allFinite())
    throw NumericalError("effective_params: singular information-plus-penalty matrix");
  return smoother.trace();
}

double gcv_score(const FitResult& fit, const PenalizedObjective& obj) {
  const double n = static_cast<double>(obj.n_obs());
  const double e = effective_params(fit, obj);
  if (e >= n) return std::numeric_limits<double>::infinity();
  const double ell = n * obj.avg_value(fit.beta);
  const double denom = 1.0 - e / n;
  return -ell / (n * denom * denom);
}

TuningResult gcv_select(const PenalizedObjective& obj, const TuneOptions& options) {
  const Eigen::Index d = obj.dim();
  const double n = static_cast<double>(obj.n_obs());

  Eigen::VectorXd factor = options.penalty_factor.size()
                               ? options.penalty_factor
                               : Eigen::VectorXd::Ones(d);
  if (factor.size() != d) throw InvalidArgument("gcv_select: penalty_factor length mismatch");
  for (Eigen::Index j = 0; j < d; ++j)
    if (factor[j] < 0.0) throw InvalidArgument("gcv_select: penalty_factor must be >= 0");

  // lambda_j = lambda * se(MLE)_j * factor_j; se falls back to unit scaling
  // when no finite MLE exists.
  std::optional<Eigen::VectorXd> mle = maximize_unpenalized(obj);
  Eigen::VectorXd se;
  if (options.se_override) {
    se = *options.se_override;
    if (se.size() != d) throw InvalidArgument("gcv_select: se_override length mismatch");
  } else if (mle) {
    se = observed_information_se(obj, *mle);
  } else {
    se = Eigen::VectorXd::Ones(d);
  }

  std::vector<double> grid = options.lambda_grid;
  if (grid.empty()) {
    // Smallest base lambda that zeroes every penalized coordinate under the
    // soft rule at the MLE scale.
    double lambda_max = 0.0;
    if (mle) {
      for (Eigen::Index j = 0; j < d; ++j)
        if (factor[j] > 0.0) lambda_max = std::max(lambda_max, std::abs((*mle)[j]) / (se[j] * factor[j]));
    } else {
      Eigen::VectorXd g(d);
      Eigen::MatrixXd h(d, d);
      obj.avg_derivatives(Eigen::VectorXd::Zero(d), g, h);
      for (Eigen::Index j = 0; j < d; ++j)
        if (factor[j] > 0.0) lambda_max = std::max(lambda_max, std::abs(g[j]) / (se[j] * factor[j]));
    }
    if (!(lambda_max > 0.0)) lambda_max = 1.0;
    const int m = std::max(options.grid_size, 1);
    const double lo = std::log(lambda_max * 1e-4), hi = std::log(lambda_max);
    for (int i = 0; i < m; ++i)
      grid.push_back(std::exp(m == 1 ? hi : lo + (hi - lo) * i / (m - 1)));
  }
  if (grid.empty()) throw InvalidArgument("gcv_select: empty lambda grid");

  LqaConfig lqa = options.lqa;
  if (mle && lqa.init == LqaConfig::Init::Mle) {
    lqa.init = LqaConfig::Init::User;  // reuse the MLE across the grid
    lqa.user_init = *mle;
  }

  TuningResult result;
  result.lambda_grid = grid;
  result.se_scale = se;
  double best = std::numeric_limits<double>::infinity();
  bool have_best = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<PenaltySpec> penalties(static_cast<std::size_t>(d));
    for (Eigen::Index j = 0; j < d; ++j)
      penalties[static_cast<std::size_t>(j)] =
          PenaltySpec{options.kind, grid[i] * se[j] * factor[j], options.shape};
    FitResult fit = lqa_fit(obj, penalties, lqa);
    double e = std::numeric_limits<double>::quiet_NaN();
    double score = std::numeric_limits<double>::infinity();
    try {
      e = effective_params(fit, obj);
      if (e < n) {
        const double denom = 1.0 - e / n;
        score = -(n * obj.avg_value(fit.beta)) / (n * denom * denom);
      }
    } catch (const NumericalError&) {
      score = std::numeric_limits<double>::infinity();
    }
    result.gcv_scores.push_back(score);
    result.effective_params.push_back(e);
    if (!have_best || score < best) {
      best = score;
      have_best = true;
      result.chosen_index = i;
      result.chosen_lambda = grid[i];
      result.fit_at_chosen = std::move(fit);
      result.penalties_at_chosen = std::move(penalties);
    }
  }
  result.per_coordinate_lambda.resize(d);
  for (Eigen::Index j = 0; j < d; ++j)
    result.per_coordinate_lambda[j] = result.chosen_lambda * se[j] * factor[j];
  return result;
}

Eigen::MatrixXd sandwich_cov(const FitResult& fit, const PenalizedObjective& obj,
                             const std::vector<PenaltySpec>& penalties) {
  if (fit.active_set.empty())
    throw InvalidArgument("sandwich_cov: empty active set");
  if (static_cast<Eigen::Index>(penalties.size()) != obj.dim())
    throw InvalidArgument("sandwich_cov: penalty list length mismatch");
  const double n = static_cast<double>(obj.n_obs());
  const auto k = static_cast<Eigen::Index>(fit.active_set.size());

  Eigen::MatrixXd bracket = active_information(fit, obj);
  for (Eigen::Index r = 0; r < k; ++r) bracket(r, r) += n * fit.sigma_lambda[fit.active_set[r]];

  const Eigen::MatrixXd scores = obj.per_obs_scores(fit.beta);
  Eigen::MatrixXd s(scores.rows(), k);
  for (Eigen::Index c = 0; c < k; ++c) s.col(c) = scores.col(fit.active_set[c]);
  const Eigen::RowVectorXd mean = s.colwise().mean();
  s.rowwise() -= mean;
  const Eigen::MatrixXd score_cov = s.transpose() * s;

  Eigen::LDLT<Eigen::MatrixXd> ldlt(bracket);
  if (ldlt.info() != Eigen::Success)
    throw NumericalError("sandwich_cov: singular bracket matrix");
  const Eigen::MatrixXd inv = ldlt.solve(Eigen::MatrixXd::Identity(k, k));
  if (!inv.allFinite()) throw NumericalError("sandwich_cov: singular bracket matrix");
  Eigen::MatrixXd cov = inv * score_cov * inv;
  return 0.5 * (cov + cov.transpose());
}

std::vector<SubsetCriteria> classical_criteria(
    const Dataset& data, const std::vector<std::vector<Eigen::Index>>& subsets, double lambda) {
  const double n = static_cast<double>(data.n());
  const double ybar = data.y.mean();
  const double tss = (data.y.array() - ybar).matrix().squaredNorm();

  std::vector<SubsetCriteria> out;
  out.reserve(subsets.size());
  for (const auto& subset : subsets) {
    for (Eigen::Index j : subset)
      if (j < 0 || j >= data.d())
        throw InvalidArgument("classical_criteria: subset references a missing column");
    const auto m = static_cast<double>(subset.size()) + 1.0;  // intercept counts
    Eigen::MatrixXd design(data.n(), static_cast<Eigen::Index>(subset.size()) + 1);
    design.col(0).setOnes();
    for (std::size_t c = 0; c < subset.size(); ++c)
      design.col(static_cast<Eigen::Index>(c) + 1) = data.X.col(subset[c]);
    const Eigen::VectorXd coef = design.householderQr().solve(data.y);
    const double rss = (data.y - design * coef).squaredNorm();

    SubsetCriteria crit;
    crit.subset = subset;
    crit.rss = rss;
    crit.adjusted_r2 = 1.0 - (n - 1.0) / (n - m) * rss / tss;
    const double denom = 1.0 - m / n;
    crit.gcv = rss / (n * denom * denom);
    crit.pls = rss / (2.0 * n) + 0.5 * lambda * lambda * m;
    out.push_back(std::move(crit));
  }
  return out;
}

}  // namespace penlik
