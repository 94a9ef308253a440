#include "core/cox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/errors.hpp"

namespace penlik {

namespace {

void check_dims(const Eigen::VectorXd& beta, const SurvivalData& data) {
  if (beta.size() != data.d())
    throw InvalidArgument("cox: beta length does not match design columns");
}

std::vector<Eigen::Index> sorted_by_time(const SurvivalData& data) {
  std::vector<Eigen::Index> order(data.n());
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return data.time[a] < data.time[b];
  });
  return order;
}

}  // namespace

RiskSetIndex build_risk_sets(const SurvivalData& data) {
  const auto order = sorted_by_time(data);
  RiskSetIndex idx;
  for (std::size_t p = 0; p < order.size(); ++p) {
    const Eigen::Index i = order[p];
    if (data.status[i] != 1) continue;
    const double t = data.time[i];
    idx.failure_times.push_back(t);
    idx.failure_index.push_back(i);
    std::vector<Eigen::Index> risk;
    for (Eigen::Index k = 0; k < data.n(); ++k)
      if (data.time[k] >= t) risk.push_back(k);
    std::sort(risk.begin(), risk.end());
    idx.risk_sets.push_back(std::move(risk));
  }
  if (idx.failure_times.empty())
    throw InvalidArgument("build_risk_sets: all observations censored");
  return idx;
}

CoxObjective::CoxObjective(SurvivalData data) : data_(std::move(data)) {
  order_ = sorted_by_time(data_);
  const Eigen::Index n = data_.n();
  for (Eigen::Index p = 0; p < n; ++p) {
    const Eigen::Index i = order_[p];
    if (data_.status[i] != 1) continue;
    events_.push_back(p);
    // First sorted position with the same time: ties share the risk set.
    Eigen::Index start = p;
    while (start > 0 && data_.time[order_[start - 1]] == data_.time[i]) --start;
    risk_start_.push_back(start);
  }
}

double CoxObjective::avg_value(const Eigen::VectorXd& beta) const {
  check_dims(beta, data_);
  const Eigen::VectorXd eta = data_.X * beta;
  const double m = eta.maxCoeff();
  const Eigen::Index n = data_.n();
  double value = 0.0;
  double s0 = 0.0;
  Eigen::Index p = n;
  for (Eigen::Index j = static_cast<Eigen::Index>(events_.size()) - 1; j >= 0; --j) {
    while (p > risk_start_[j]) {
      --p;
      s0 += std::exp(eta[order_[p]] - m);
    }
    const Eigen::Index i = order_[events_[j]];
    value += eta[i] - (m + std::log(s0));
  }
  return value / static_cast<double>(n);
}

void CoxObjective::avg_derivatives(const Eigen::VectorXd& beta, Eigen::VectorXd& grad,
                                   Eigen::MatrixXd& hess) const {
  check_dims(beta, data_);
  const Eigen::Index n = data_.n();
  const Eigen::Index d = data_.d();
  const Eigen::VectorXd eta = data_.X * beta;
  const double m = eta.maxCoeff();
  double s0 = 0.0;
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(d, d);
  grad = Eigen::VectorXd::Zero(d);
  hess = Eigen::MatrixXd::Zero(d, d);
  Eigen::Index p = n;
  for (Eigen::Index j = static_cast<Eigen::Index>(events_.size()) - 1; j >= 0; --j) {
    while (p > risk_start_[j]) {
      --p;
      const Eigen::Index k = order_[p];
      const double w = std::exp(eta[k] - m);
      s0 += w;
      s1 += w * data_.X.row(k).transpose();
      s2.selfadjointView<Eigen::Lower>().rankUpdate(data_.X.row(k).transpose(), w);
    }
    const Eigen::Index i = order_[events_[j]];
    const Eigen::VectorXd xbar = s1 / s0;
    grad += data_.X.row(i).transpose() - xbar;
    Eigen::MatrixXd s2full = s2.selfadjointView<Eigen::Lower>();
    hess -= s2full / s0 - xbar * xbar.transpose();
  }
  grad /= static_cast<double>(n);
  hess /= static_cast<double>(n);
}

Eigen::MatrixXd CoxObjective::per_obs_scores(const Eigen::VectorXd& beta) const {
  check_dims(beta, data_);
  const Eigen::Index n = data_.n();
  const Eigen::Index d = data_.d();
  const Eigen::VectorXd eta = data_.X * beta;
  const double m = eta.maxCoeff();
  double s0 = 0.0;
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd scores(static_cast<Eigen::Index>(events_.size()), d);
  Eigen::Index p = n;
  for (Eigen::Index j = static_cast<Eigen::Index>(events_.size()) - 1; j >= 0; --j) {
    while (p > risk_start_[j]) {
      --p;
      const Eigen::Index k = order_[p];
      const double w = std::exp(eta[k] - m);
      s0 += w;
      s1 += w * data_.X.row(k).transpose();
    }
    const Eigen::Index i = order_[events_[j]];
    scores.row(j) = data_.X.row(i) - (s1 / s0).transpose();
  }
  return scores;
}

double partial_loglik(const Eigen::VectorXd& beta, const SurvivalData& data) {
  return CoxObjective(data).avg_value(beta) * static_cast<double>(data.n());
}

void partial_loglik_derivatives(const Eigen::VectorXd& beta, const SurvivalData& data,
                                Eigen::VectorXd& grad, Eigen::MatrixXd& hess) {
  CoxObjective obj(data);
  obj.avg_derivatives(beta, grad, hess);
  grad *= static_cast<double>(data.n());
  hess *= static_cast<double>(data.n());
}

}  // namespace penlik
