#pragma once

#include <Eigen/Dense>
#include <vector>

#include "core/dataset.hpp"

namespace penlik {

struct SubsetFit {
  std::vector<Eigen::Index> subset;
  Eigen::VectorXd beta;  // full length d, zeros off the subset
  double rss = 0.0;
  double objective = 0.0;  // RSS/(2n) + lambda^2 |M| / 2
};

// Exhaustive minimizer of RSS/(2n) + (lambda^2/2)|M| over all column subsets,
// with OLS coefficients on the winner. Refuses d > max_d.
SubsetFit best_subset_oracle(const Dataset& data, double lambda, int max_d = 15);

}  // namespace penlik
