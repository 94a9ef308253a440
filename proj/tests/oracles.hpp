// Test-only oracles, kept independent of the implementation paths they check:
// a coarse-to-fine grid minimizer for the scalar PLS objective and central
// finite differences for gradients/Hessians.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "core/penalty.hpp"

namespace oracles {

// Global minimizer of Q(b) = (1/2)(z-b)^2 + p(|b|) by scanning a coarse grid
// over [-(|z|+1), |z|+1] and refining every coarse local minimum (plus the
// 0 and z candidates) at `fine` resolution. Equivalent to a full fine-grid
// scan because Q's basins are wider than the coarse step.
inline double grid_threshold(const penlik::PenaltySpec& spec, double z, double coarse = 1e-2,
                             double fine = 1e-5) {
  const auto q = [&](double b) {
    return 0.5 * (z - b) * (z - b) + penlik::penalty_value(spec, std::abs(b));
  };
  const double hi = std::abs(z) + 1.0;
  const int m = static_cast<int>(std::ceil(2.0 * hi / coarse)) + 1;
  std::vector<double> grid(m), val(m);
  for (int i = 0; i < m; ++i) {
    grid[i] = -hi + (2.0 * hi) * i / (m - 1);
    val[i] = q(grid[i]);
  }
  std::vector<double> candidates{0.0, z};
  for (int i = 0; i < m; ++i) {
    const bool left_ok = i == 0 || val[i] <= val[i - 1];
    const bool right_ok = i == m - 1 || val[i] <= val[i + 1];
    if (left_ok && right_ok) candidates.push_back(grid[i]);
  }
  double best_b = 0.0, best_q = q(0.0);
  const double step = 2.0 * hi / (m - 1);
  for (double c : candidates) {
    const double lo = c - step, up = c + step;
    const int refine_steps = static_cast<int>(std::ceil((up - lo) / fine));
    for (int i = 0; i <= refine_steps; ++i) {
      const double b = lo + (up - lo) * i / refine_steps;
      const double v = q(b);
      if (v < best_q) {
        best_q = v;
        best_b = b;
      }
    }
  }
  return best_b;
}

inline double central_diff(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Gradient of f at x by central differences.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Eigen::VectorXd hi = x, lo = x;
    hi[j] += h;
    lo[j] -= h;
    g[j] = (f(hi) - f(lo)) / (2.0 * h);
  }
  return g;
}

// Hessian of f at x by central second differences.
inline Eigen::MatrixXd fd_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                                  const Eigen::VectorXd& x, double h = 1e-5) {
  const Eigen::Index d = x.size();
  Eigen::MatrixXd out(d, d);
  const double f0 = f(x);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i; j < d; ++j) {
      if (i == j) {
        Eigen::VectorXd hi = x, lo = x;
        hi[i] += h;
        lo[i] -= h;
        out(i, i) = (f(hi) - 2.0 * f0 + f(lo)) / (h * h);
      } else {
        Eigen::VectorXd pp = x, pm = x, mp = x, mm = x;
        pp[i] += h; pp[j] += h;
        pm[i] += h; pm[j] -= h;
        mp[i] -= h; mp[j] += h;
        mm[i] -= h; mm[j] -= h;
        out(i, j) = out(j, i) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h * h);
      }
    }
  }
  return out;
}

}  // namespace oracles
