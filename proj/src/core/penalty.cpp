#include "core/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "core/errors.hpp"

namespace penlik {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Minimize a unimodal f on [lo, hi] to within tol in the argument.
template <typename F>
double golden_section(F&& f, double lo, double hi, double tol) {
  constexpr double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

PenaltySpec PenaltySpec::hard(double lambda) { return {PenaltyKind::Hard, lambda, 0.0}; }
PenaltySpec PenaltySpec::entropy(double lambda) { return {PenaltyKind::Entropy, lambda, 0.0}; }
PenaltySpec PenaltySpec::l1(double lambda) { return {PenaltyKind::L1, lambda, 0.0}; }
PenaltySpec PenaltySpec::l2(double lambda, double c) { return {PenaltyKind::L2, lambda, c}; }
PenaltySpec PenaltySpec::bridge(double lambda, double q) { return {PenaltyKind::Bridge, lambda, q}; }
PenaltySpec PenaltySpec::scad(double lambda, double a) { return {PenaltyKind::Scad, lambda, a}; }

void PenaltySpec::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw InvalidArgument("penalty: lambda must be finite and >= 0");
  switch (kind) {
    case PenaltyKind::Scad:
      if (!(shape > 2.0)) throw InvalidArgument("scad: shape parameter a must be > 2");
      break;
    case PenaltyKind::Bridge:
      if (!(shape > 0.0 && shape < 2.0))
        throw InvalidArgument("bridge: exponent q must lie in (0,2)");
      break;
    case PenaltyKind::L2:
      if (!(shape > 0.0)) throw InvalidArgument("l2: quadratic coefficient must be > 0");
      break;
    default:
      break;
  }
}

bool PenaltySpec::origin_singular() const {
  if (lambda == 0.0) return false;
  switch (kind) {
    case PenaltyKind::Hard:
    case PenaltyKind::L1:
    case PenaltyKind::Scad:
      return true;
    case PenaltyKind::Bridge:
      return shape <= 1.0;
    case PenaltyKind::Entropy:  // singular as a function, but p'(0+) = 0
    case PenaltyKind::L2:
      return false;
  }
  return false;
}

double penalty_value(const PenaltySpec& spec, double beta_abs) {
  spec.validate();
  if (beta_abs < 0.0 || !std::isfinite(beta_abs))
    throw InvalidArgument("penalty_value: |beta| must be finite and >= 0");
  const double lam = spec.lambda;
  switch (spec.kind) {
    case PenaltyKind::Hard: {
      const double t = std::max(lam - beta_abs, 0.0);
      return 0.5 * (lam * lam - t * t);
    }
    case PenaltyKind::Entropy:
      return beta_abs == 0.0 ? 0.0 : 0.5 * lam * lam;
    case PenaltyKind::L1:
      return lam * beta_abs;
    case PenaltyKind::L2:
      return spec.shape * lam * beta_abs * beta_abs;
    case PenaltyKind::Bridge:
      return lam * std::pow(beta_abs, spec.shape);
    case PenaltyKind::Scad: {
      const double a = spec.shape;
      if (beta_abs < lam) return lam * beta_abs;
      if (beta_abs < a * lam)
        return -(beta_abs * beta_abs - 2.0 * a * lam * beta_abs + lam * lam) / (2.0 * (a - 1.0));
      return (a + 1.0) * lam * lam / 2.0;
    }
  }
  throw InvalidArgument("penalty_value: unknown kind");
}

double penalty_deriv(const PenaltySpec& spec, double beta_abs) {
  spec.validate();
  if (!(beta_abs > 0.0) || !std::isfinite(beta_abs))
    throw InvalidArgument("penalty_deriv: |beta| must be finite and > 0");
  const double lam = spec.lambda;
  switch (spec.kind) {
    case PenaltyKind::Hard:
      return std::max(lam - beta_abs, 0.0);
    case PenaltyKind::Entropy:
      return 0.0;
    case PenaltyKind::L1:
      return lam;
    case PenaltyKind::L2:
      return 2.0 * spec.shape * lam * beta_abs;
    case PenaltyKind::Bridge:
      return lam * spec.shape * std::pow(beta_abs, spec.shape - 1.0);
    case PenaltyKind::Scad: {
      const double a = spec.shape;
      if (beta_abs < lam) return lam;
      if (beta_abs < a * lam) return (a * lam - beta_abs) / (a - 1.0);
      return 0.0;
    }
  }
  throw InvalidArgument("penalty_deriv: unknown kind");
}

double penalty_deriv_at_zero_plus(const PenaltySpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case PenaltyKind::Hard:
    case PenaltyKind::L1:
    case PenaltyKind::Scad:
      return spec.lambda;
    case PenaltyKind::Entropy:
    case PenaltyKind::L2:
      return 0.0;
    case PenaltyKind::Bridge:
      if (spec.lambda == 0.0) return 0.0;
      if (spec.shape < 1.0) return kInf;
      if (spec.shape == 1.0) return spec.lambda;
      return 0.0;
  }
  throw InvalidArgument("penalty_deriv_at_zero_plus: unknown kind");
}

double threshold(const PenaltySpec& spec, double z) {
  spec.validate();
  if (!std::isfinite(z)) throw InvalidArgument("threshold: z must be finite");
  if (z == 0.0) return 0.0;
  if (z < 0.0) return -threshold(spec, -z);
  const double lam = spec.lambda;
  if (lam == 0.0) return z;
  switch (spec.kind) {
    case PenaltyKind::Hard:
    case PenaltyKind::Entropy:
      // Q(0) = z^2/2 vs Q(z) = lam^2/2; tie at |z| = lam goes to 0.
      return z > lam ? z : 0.0;
    case PenaltyKind::L1:
      return std::max(z - lam, 0.0);
    case PenaltyKind::L2:
      return z / (1.0 + 2.0 * spec.shape * lam);
    case PenaltyKind::Scad: {
      const double a = spec.shape;
      if (z <= 2.0 * lam) return std::max(z - lam, 0.0);
      if (z <= a * lam) return ((a - 1.0) * z - a * lam) / (a - 2.0);
      return z;
    }
    case PenaltyKind::Bridge: {
      const double q = spec.shape;
      if (q == 1.0) return std::max(z - lam, 0.0);
      const auto obj = [&](double b) {
        return 0.5 * (z - b) * (z - b) + lam * std::pow(b, q);
      };
      constexpr double tol = 1e-10;
      if (q > 1.0) {
        // Strictly convex on (0, inf) with slope -z at 0+: unique interior minimum.
        return golden_section(obj, 0.0, z, tol * std::max(1.0, z));
      }
      // q < 1: f' = b - z + lam*q*b^(q-1) is convex with minimum at b0; an
      // interior local minimum exists only when f'(b0) <= 0, and f is convex
      // (hence unimodal) on [b0, z].
      const double b0 = std::pow(lam * q * (1.0 - q), 1.0 / (2.0 - q));
      if (b0 >= z || b0 - z + lam * q * std::pow(b0, q - 1.0) > 0.0) return 0.0;
      const double cand = golden_section(obj, b0, z, tol * std::max(1.0, z));
      return obj(cand) < 0.5 * z * z ? cand : 0.0;
    }
  }
  throw InvalidArgument("threshold: unknown kind");
}

PenaltyProperties check_properties(const PenaltySpec& spec) {
  spec.validate();
  if (!(spec.lambda > 0.0)) throw InvalidArgument("check_properties: lambda must be > 0");
  const double lam = spec.lambda;
  const double a_factor = spec.kind == PenaltyKind::Scad ? spec.shape : 3.7;
  const double hi = 10.0 * a_factor * lam;
  const double lo = 1e-10 * lam;
  constexpr int kPoints = 4000;

  // f(b) = b + p'(b) on a log-spaced grid.
  double min_val = kInf;
  double largest_attaining = lo;
  const double log_lo = std::log(lo), log_hi = std::log(hi);
  std::vector<double> grid(kPoints), fval(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    const double b = std::exp(log_lo + (log_hi - log_lo) * i / (kPoints - 1));
    grid[i] = b;
    fval[i] = b + penalty_deriv(spec, b);
    min_val = std::min(min_val, fval[i]);
  }
  const double attain_tol = 1e-7 * (lam + std::abs(min_val));
  for (int i = 0; i < kPoints; ++i)
    if (fval[i] <= min_val + attain_tol) largest_attaining = std::max(largest_attaining, grid[i]);

  PenaltyProperties props;
  props.sparsity = min_val > 1e-6 * lam;
  props.continuity = largest_attaining <= 1e-4 * lam;

  // Unbiasedness: p' vanishes at the top of the grid or strictly decays
  // toward zero across the last decade (Bridge reaches 0 only in the limit).
  const double p_top = penalty_deriv(spec, hi);
  const double p_prev = penalty_deriv(spec, hi / 10.0);
  const double zero_tol = 1e-12 * (1.0 + lam);
  if (p_top <= zero_tol) {
    props.unbiasedness = true;
  } else {
    const double p_lam = penalty_deriv(spec, lam);
    props.unbiasedness = p_prev > zero_tol && p_top / p_prev <= 0.9 && p_top < p_lam;
  }
  return props;
}

PenaltyKind penalty_kind_from_string(const std::string& name) {
  if (name == "hard") return PenaltyKind::Hard;
  if (name == "entropy" || name == "l0") return PenaltyKind::Entropy;
  if (name == "l1" || name == "lasso") return PenaltyKind::L1;
  if (name == "l2" || name == "ridge") return PenaltyKind::L2;
  if (name == "bridge") return PenaltyKind::Bridge;
  if (name == "scad") return PenaltyKind::Scad;
  throw InvalidArgument("unknown penalty kind: " + name);
}

std::string to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::Hard: return "hard";
    case PenaltyKind::Entropy: return "entropy";
    case PenaltyKind::L1: return "l1";
    case PenaltyKind::L2: return "l2";
    case PenaltyKind::Bridge: return "bridge";
    case PenaltyKind::Scad: return "scad";
  }
  return "?";
}

double default_shape(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::Scad: return 3.7;
    case PenaltyKind::Bridge: return 0.5;
    case PenaltyKind::L2: return 1.0;
    default: return 0.0;
  }
}

}  // namespace penlik
