#include "core/lqa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/errors.hpp"
#include "core/glm.hpp"

namespace penlik {

namespace {

void validate_penalties(const PenalizedObjective& obj, const std::vector<PenaltySpec>& penalties) {
  if (static_cast<Eigen::Index>(penalties.size()) != obj.dim())
    throw InvalidArgument("lqa_fit: penalty list length must equal the coefficient dimension");
  for (const auto& p : penalties) p.validate();
}

double penalized_value(const PenalizedObjective& obj, const std::vector<PenaltySpec>& penalties,
                       const Eigen::VectorXd& beta) {
  double v = obj.avg_value(beta);
  for (Eigen::Index j = 0; j < beta.size(); ++j)
    v -= penalty_value(penalties[j], std::abs(beta[j]));
  return v;
}

// LQA weight p'(|b|)/|b|, with the exact ridge limit at 0.
double sigma_entry(const PenaltySpec& pen, double b) {
  if (pen.lambda == 0.0) return 0.0;
  if (pen.kind == PenaltyKind::L2) return 2.0 * pen.shape * pen.lambda;
  if (pen.kind == PenaltyKind::Entropy) return 0.0;
  const double ab = std::max(std::abs(b), 1e-12);
  return penalty_deriv(pen, ab) / ab;
}

Eigen::VectorXd initial_beta(const PenalizedObjective& obj, const LqaConfig& cfg) {
  switch (cfg.init) {
    case LqaConfig::Init::Zeros:
      return Eigen::VectorXd::Zero(obj.dim());
    case LqaConfig::Init::User:
      if (cfg.user_init.size() != obj.dim())
        throw InvalidArgument("lqa_fit: user_init length mismatch");
      return cfg.user_init;
    case LqaConfig::Init::Mle: {
      auto mle = maximize_unpenalized(obj);
      // No finite MLE (e.g. separated logistic data): fall back to zeros.
      return mle ? *mle : Eigen::VectorXd::Zero(obj.dim());
    }
  }
  throw InvalidArgument("lqa_fit: unknown init mode");
}

struct LqaState {
  Eigen::VectorXd beta;
  std::vector<bool> clamped;
  double objective = 0.0;
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
};

// One LQA convergence run over the unclamped coordinates. May clamp more
// coordinates as it goes; clamps are permanent.
void run_lqa_loop(const PenalizedObjective& obj, const std::vector<PenaltySpec>& penalties,
                  const LqaConfig& cfg, double clamp_tau, LqaState& st) {
  const Eigen::Index d = obj.dim();
  Eigen::VectorXd grad(d);
  Eigen::MatrixXd hess(d, d);
  double last_change = std::numeric_limits<double>::infinity();

  while (st.iterations < cfg.max_iter) {
    std::vector<Eigen::Index> active;
    for (Eigen::Index j = 0; j < d; ++j)
      if (!st.clamped[j]) active.push_back(j);
    if (active.empty()) {
      st.converged = true;
      return;
    }
    obj.avg_derivatives(st.beta, grad, hess);

    bool stationary = true;
    for (Eigen::Index j : active) {
      double r = grad[j];
      if (st.beta[j] != 0.0 && penalties[j].lambda > 0.0)
        r -= penalty_deriv(penalties[j], std::abs(st.beta[j])) * (st.beta[j] > 0 ? 1.0 : -1.0);
      if (std::abs(r) > cfg.tol) {
        stationary = false;
        break;
      }
    }
    if (stationary && last_change <= cfg.tol) {
      st.converged = true;
      return;
    }

    const auto k = static_cast<Eigen::Index>(active.size());
    Eigen::VectorXd g(k), b(k), sig(k);
    Eigen::MatrixXd h(k, k);
    for (Eigen::Index r = 0; r < k; ++r) {
      g[r] = grad[active[r]];
      b[r] = st.beta[active[r]];
      sig[r] = sigma_entry(penalties[active[r]], st.beta[active[r]]);
      for (Eigen::Index c = 0; c < k; ++c) h(r, c) = hess(active[r], active[c]);
    }

    // Newton step on the quadratic surrogate: (Sigma - H) b_new = g - H b.
    Eigen::MatrixXd lhs = -h;
    lhs.diagonal() += sig;
    const Eigen::VectorXd rhs = g - h * b;
    Eigen::VectorXd b_new;
    double jitter = 0.0;
    const double diag_scale = 1.0 + lhs.diagonal().cwiseAbs().maxCoeff();
    for (;;) {
      Eigen::LDLT<Eigen::MatrixXd> ldlt(lhs);
      if (ldlt.info() == Eigen::Success) {
        b_new = ldlt.solve(rhs);
        if (b_new.allFinite()) break;
      }
      jitter = jitter == 0.0 ? 1e-10 * diag_scale : jitter * 10.0;
      if (jitter > 1e-2 * diag_scale)
        throw NumericalError("lqa_fit: singular working Hessian (jitter retries exhausted)");
      lhs.diagonal().array() += jitter;
    }

    // Step halving guards monotone ascent of the true penalized objective.
    Eigen::VectorXd cand = st.beta;
    double t = 1.0;
    double cand_val = 0.0;
    int halvings = 0;
    bool stuck = false;
    for (;;) {
      for (Eigen::Index r = 0; r < k; ++r) cand[active[r]] = b[r] + t * (b_new[r] - b[r]);
      cand_val = penalized_value(obj, penalties, cand);
      if (std::isfinite(cand_val) && cand_val >= st.objective - 1e-12) break;
      if (++halvings > cfg.max_halvings) {
        cand = st.beta;
        cand_val = st.objective;
        stuck = true;
        break;
      }
      t *= 0.5;
    }

    last_change = (cand - st.beta).cwiseAbs().maxCoeff();
    st.beta = cand;
    st.objective = std::max(cand_val, st.objective);
    ++st.iterations;

    // Zero-clamp: coordinates of origin-singular penalties very close to 0
    // are deleted for the remainder of the run. The objective check keeps the
    // ascent property exact.
    for (Eigen::Index j : active) {
      if (!penalties[j].origin_singular()) continue;
      if (st.beta[j] == 0.0 || std::abs(st.beta[j]) >= clamp_tau) continue;
      Eigen::VectorXd zeroed = st.beta;
      zeroed[j] = 0.0;
      const double zv = penalized_value(obj, penalties, zeroed);
      if (zv >= st.objective - 1e-12) {
        st.beta = zeroed;
        st.objective = std::max(zv, st.objective);
        st.clamped[j] = true;
      }
    }
    st.trace.push_back(st.objective);

    if (stuck) return;  // no ascent at any step length; leave converged=false
  }
}

}  // namespace

Eigen::VectorXd maximize_on_support(const PenalizedObjective& obj,
                                    const std::vector<Eigen::Index>& support, double tol,
                                    int max_iter) {
  const Eigen::Index d = obj.dim();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
  if (support.empty()) return beta;
  const auto k = static_cast<Eigen::Index>(support.size());
  Eigen::VectorXd grad(d);
  Eigen::MatrixXd hess(d, d);
  double value = obj.avg_value(beta);
  for (int iter = 0; iter < max_iter; ++iter) {
    obj.avg_derivatives(beta, grad, hess);
    Eigen::VectorXd g(k);
    Eigen::MatrixXd h(k, k);
    for (Eigen::Index r = 0; r < k; ++r) {
      g[r] = grad[support[r]];
      for (Eigen::Index c = 0; c < k; ++c) h(r, c) = hess(support[r], support[c]);
    }
    Eigen::MatrixXd neg = -h;
    double jitter = 0.0;
    Eigen::VectorXd step;
    for (;;) {
      Eigen::LDLT<Eigen::MatrixXd> ldlt(neg);
      if (ldlt.info() == Eigen::Success) {
        step = ldlt.solve(g);
        if (step.allFinite()) break;
      }
      jitter = jitter == 0.0 ? 1e-12 * (1.0 + neg.trace()) : jitter * 10.0;
      if (jitter > 1e2) throw NumericalError("maximize_on_support: singular Hessian");
      neg.diagonal().array() += jitter;
    }
    Eigen::VectorXd cand = beta;
    double t = 1.0;
    double cand_value = 0.0;
    int halvings = 0;
    for (;;) {
      for (Eigen::Index r = 0; r < k; ++r) cand[support[r]] = beta[support[r]] + t * step[r];
      cand_value = obj.avg_value(cand);
      if (std::isfinite(cand_value) && cand_value >= value - 1e-14) break;
      if (++halvings > 60) {
        cand = beta;
        cand_value = value;
        break;
      }
      t *= 0.5;
    }
    const double change = (cand - beta).cwiseAbs().maxCoeff();
    beta = cand;
    value = cand_value;
    if (change <= tol) break;
  }
  return beta;
}

namespace {

// Exact L0 route. Exhaustive enumeration of penalized-coordinate supports up
// to the limit; above it, Gaussian-only cyclic coordinate descent with the
// closed-form scalar L0 update plus an OLS refit on the final support.
FitResult entropy_fit(const PenalizedObjective& obj, const std::vector<PenaltySpec>& penalties,
                      const LqaConfig& cfg) {
  const Eigen::Index d = obj.dim();
  std::vector<Eigen::Index> penalized, free_coords;
  for (Eigen::Index j = 0; j < d; ++j) {
    if (penalties[j].lambda > 0.0) {
      if (penalties[j].kind != PenaltyKind::Entropy)
        throw InvalidArgument("lqa_fit: entropy penalties cannot be mixed with other kinds");
      penalized.push_back(j);
    } else {
      free_coords.push_back(j);
    }
  }

  FitResult out;
  out.sigma_lambda = Eigen::VectorXd::Zero(d);

  if (static_cast<int>(penalized.size()) <= cfg.entropy_exhaustive_limit) {
    double best = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_beta = Eigen::VectorXd::Zero(d);
    const std::uint64_t n_masks = 1ULL << penalized.size();
    for (std::uint64_t mask = 0; mask < n_masks; ++mask) {
      std::vector<Eigen::Index> support = free_coords;
      double pen = 0.0;
      for (std::size_t b = 0; b < penalized.size(); ++b) {
        if (mask & (1ULL << b)) {
          support.push_back(penalized[b]);
          pen += 0.5 * penalties[penalized[b]].lambda * penalties[penalized[b]].lambda;
        }
      }
      std::sort(support.begin(), support.end());
      const Eigen::VectorXd beta = maximize_on_support(obj, support);
      const double value = obj.avg_value(beta) - pen;
      if (value > best) {
        best = value;
        best_beta = beta;
      }
    }
    out.beta = best_beta;
    out.objective = best;
    out.converged = true;
    out.iterations = static_cast<int>(n_masks);
    out.objective_trace.push_back(best);
  } else {
    const auto* glm = dynamic_cast<const GlmObjective*>(&obj);
    if (glm == nullptr || glm->model().family != Family::Gaussian)
      throw InvalidArgument(
          "lqa_fit: entropy penalty beyond the enumeration limit is only available for Gaussian "
          "objectives");
    const Eigen::MatrixXd& X = glm->data().X;
    const Eigen::VectorXd& y = glm->data().y;
    const double n = static_cast<double>(X.rows());
    Eigen::VectorXd colsq(d);
    for (Eigen::Index j = 0; j < d; ++j) colsq[j] = X.col(j).squaredNorm() / n;

    std::vector<Eigen::Index> all;
    for (Eigen::Index j = 0; j < d; ++j)
      if (colsq[j] > 0.0) all.push_back(j);
    Eigen::VectorXd beta = maximize_on_support(obj, all);
    Eigen::VectorXd resid = y - X * beta;

    bool stable = false;
    int sweep = 0;
    for (; sweep < 200 && !stable; ++sweep) {
      stable = true;
      for (Eigen::Index j = 0; j < d; ++j) {
        if (colsq[j] == 0.0) continue;
        const double rho = beta[j] + X.col(j).dot(resid) / (n * colsq[j]);
        double b_new = rho;
        if (penalties[j].lambda > 0.0) {
          const double lam = penalties[j].lambda;
          // (c/2) rho^2 vs lam^2/2; ties resolve to 0.
          if (colsq[j] * rho * rho <= lam * lam) b_new = 0.0;
        }
        if (b_new != beta[j]) {
          if ((b_new == 0.0) != (beta[j] == 0.0) ||
              std::abs(b_new - beta[j]) > cfg.tol)
            stable = false;
          resid += X.col(j) * (beta[j] - b_new);
          beta[j] = b_new;
        }
      }
    }
    std::vector<Eigen::Index> support;
    for (Eigen::Index j = 0; j < d; ++j)
      if (beta[j] != 0.0) support.push_back(j);
    out.beta = maximize_on_support(obj, support);
    double pen = 0.0;
    for (Eigen::Index j : support)
      if (penalties[j].lambda > 0.0)
        pen += 0.5 * penalties[j].lambda * penalties[j].lambda;
    out.objective = obj.avg_value(out.beta) - pen;
    out.converged = stable;
    out.iterations = sweep;
    out.objective_trace.push_back(out.objective);
  }

  for (Eigen::Index j = 0; j < d; ++j)
    if (out.beta[j] != 0.0) out.active_set.push_back(j);
  return out;
}

}  // namespace

FitResult lqa_fit(const PenalizedObjective& obj, const std::vector<PenaltySpec>& penalties,
                  const LqaConfig& config) {
  validate_penalties(obj, penalties);
  const Eigen::Index d = obj.dim();

  bool any_entropy = false;
  for (const auto& p : penalties)
    if (p.lambda > 0.0 && p.kind == PenaltyKind::Entropy) any_entropy = true;
  if (any_entropy) return entropy_fit(obj, penalties, config);

  LqaState st;
  st.beta = initial_beta(obj, config);
  st.clamped.assign(static_cast<std::size_t>(d), false);

  const double scale = st.beta.size() ? st.beta.cwiseAbs().maxCoeff() : 0.0;
  const double clamp_tau =
      config.clamp_tau > 0.0 ? config.clamp_tau : (scale > 0.0 ? 1e-6 * scale : 1e-12);

  // Coordinates that start inside the clamp region of a singular penalty are
  // deleted up front (their LQA weight is undefined).
  for (Eigen::Index j = 0; j < d; ++j) {
    if (penalties[j].origin_singular() && std::abs(st.beta[j]) < clamp_tau) {
      st.beta[j] = 0.0;
      st.clamped[j] = true;
    }
  }
  st.objective = penalized_value(obj, penalties, st.beta);
  st.trace.push_back(st.objective);

  // LQA runs interleaved with zero-improvement sweeps: deleting an active
  // coordinate is accepted whenever it raises the true penalized objective
  // (the comparison with the 0 branch that the scalar rules perform).
  int sweeps = 0;
  for (;;) {
    run_lqa_loop(obj, penalties, config, clamp_tau, st);
    bool improved = false;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (st.clamped[j] || st.beta[j] == 0.0 || !penalties[j].origin_singular()) continue;
      Eigen::VectorXd zeroed = st.beta;
      zeroed[j] = 0.0;
      const double zv = penalized_value(obj, penalties, zeroed);
      if (zv > st.objective + 1e-12) {
        st.beta = zeroed;
        st.objective = zv;
        st.clamped[j] = true;
        st.trace.push_back(zv);
        improved = true;
      }
    }
    if (!improved || ++sweeps > d) break;
    st.converged = false;  // re-converge after deletions
  }

  FitResult out;
  out.beta = st.beta;
  for (Eigen::Index j = 0; j < d; ++j)
    if (st.beta[j] != 0.0) out.active_set.push_back(j);
  out.objective = st.objective;
  out.iterations = st.iterations;
  out.converged = st.converged;
  out.sigma_lambda = Eigen::VectorXd::Zero(d);
  for (Eigen::Index j = 0; j < d; ++j)
    if (!st.clamped[j] && st.beta[j] != 0.0)
      out.sigma_lambda[j] = sigma_entry(penalties[j], st.beta[j]);
  out.objective_trace = st.trace;
  return out;
}

Eigen::VectorXd stationarity_residual(const FitResult& fit, const PenalizedObjective& obj,
                                      const std::vector<PenaltySpec>& penalties) {
  validate_penalties(obj, penalties);
  const double n = static_cast<double>(obj.n_obs());
  Eigen::VectorXd grad(obj.dim());
  Eigen::MatrixXd hess(obj.dim(), obj.dim());
  obj.avg_derivatives(fit.beta, grad, hess);
  Eigen::VectorXd res(static_cast<Eigen::Index>(fit.active_set.size()));
  for (std::size_t r = 0; r < fit.active_set.size(); ++r) {
    const Eigen::Index j = fit.active_set[r];
    double v = n * grad[j];
    if (penalties[j].lambda > 0.0)
      v -= n * penalty_deriv(penalties[j], std::abs(fit.beta[j])) * (fit.beta[j] > 0 ? 1.0 : -1.0);
    res[static_cast<Eigen::Index>(r)] = v;
  }
  return res;
}

double stationarity_max_norm(const FitResult& fit, const PenalizedObjective& obj,
                             const std::vector<PenaltySpec>& penalties) {
  if (fit.active_set.empty()) return 0.0;
  return stationarity_residual(fit, obj, penalties).cwiseAbs().maxCoeff();
}

PenaltyDiagnostics penalty_diagnostics(const std::vector<PenaltySpec>& penalties,
                                       const Eigen::VectorXd& beta) {
  if (static_cast<Eigen::Index>(penalties.size()) != beta.size())
    throw InvalidArgument("penalty_diagnostics: dimension mismatch");
  PenaltyDiagnostics diag;
  bool any = false;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    if (beta[j] == 0.0) continue;
    any = true;
    const double ab = std::abs(beta[j]);
    diag.a_n = std::max(diag.a_n, penalty_deriv(penalties[j], ab));
    const double h = 1e-6 * std::max(1.0, ab);
    const double lo = std::max(ab - h, 0.5 * h);
    const double second =
        (penalty_deriv(penalties[j], ab + h) - penalty_deriv(penalties[j], lo)) / (ab + h - lo);
    diag.b_n = std::max(diag.b_n, std::abs(second));
  }
  if (!any) throw InvalidArgument("penalty_diagnostics: beta has no nonzero coordinate");
  return diag;
}

}  // namespace penlik
