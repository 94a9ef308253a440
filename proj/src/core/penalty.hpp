#pragma once

#include <string>

namespace penlik {

enum class PenaltyKind {
  Hard,     // (1/2)[lambda^2 - (lambda-|b|)_+^2]; thresholds at lambda
  Entropy,  // L0: (1/2) lambda^2 I(b != 0)
  L1,       // lambda |b|
  L2,       // shape * lambda * b^2 (shape = 1 default; 0.5 gives the (1+lambda)^{-1} z rule)
  Bridge,   // lambda |b|^q, q = shape in (0,2)
  Scad      // linear/quadratic/constant pieces, shape = a > 2 (default 3.7)
};

// One member of the penalty family at one regularization level. Per-coordinate
// use is a vector of these at call sites.
struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::Scad;
  double lambda = 0.0;
  // Scad: a (> 2). Bridge: exponent q in (0,2). L2: quadratic coefficient
  // multiplier c in p = c*lambda*b^2. Ignored otherwise.
  double shape = 0.0;

  static PenaltySpec hard(double lambda);
  static PenaltySpec entropy(double lambda);
  static PenaltySpec l1(double lambda);
  static PenaltySpec l2(double lambda, double c = 1.0);
  static PenaltySpec bridge(double lambda, double q = 0.5);
  static PenaltySpec scad(double lambda, double a = 3.7);

  PenaltySpec with_lambda(double lam) const {
    PenaltySpec s = *this;
    s.lambda = lam;
    return s;
  }

  void validate() const;
  // Singular at the origin (p'(0+) > 0): these kinds produce exact zeros.
  bool origin_singular() const;
};

struct PenaltyProperties {
  bool sparsity = false;
  bool unbiasedness = false;
  bool continuity = false;
};

// p_lambda(|b|). beta_abs must be >= 0.
double penalty_value(const PenaltySpec& spec, double beta_abs);

// p'_lambda(|b|) for beta_abs > 0 (the derivative in |b|).
double penalty_deriv(const PenaltySpec& spec, double beta_abs);

// Right limit p'(0+); +infinity for Bridge with q < 1.
double penalty_deriv_at_zero_plus(const PenaltySpec& spec);

// Global minimizer of Q(b) = (1/2)(z-b)^2 + p_lambda(|b|). Odd in z; ties at
// penalty breakpoints resolve toward the smaller-|b| branch.
double threshold(const PenaltySpec& spec, double z);

// Numeric evaluation of the sparsity/unbiasedness/continuity conditions on a
// log-spaced grid over (0, 10*a*lambda]. Requires lambda > 0.
PenaltyProperties check_properties(const PenaltySpec& spec);

PenaltyKind penalty_kind_from_string(const std::string& name);
std::string to_string(PenaltyKind kind);
double default_shape(PenaltyKind kind);

}  // namespace penlik
