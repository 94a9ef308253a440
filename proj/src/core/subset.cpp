#include "core/subset.hpp"

#include <limits>
#include <string>

#include "core/errors.hpp"

namespace penlik {

SubsetFit best_subset_oracle(const Dataset& data, double lambda, int max_d) {
  const Eigen::Index d = data.d();
  if (d > max_d)
    throw InvalidArgument("best_subset_oracle: d = " + std::to_string(d) +
                          " exceeds the exhaustive-search limit " + std::to_string(max_d));
  if (lambda < 0.0) throw InvalidArgument("best_subset_oracle: lambda must be >= 0");
  const double n = static_cast<double>(data.n());

  SubsetFit best;
  best.objective = std::numeric_limits<double>::infinity();
  const std::uint64_t n_masks = 1ULL << d;
  for (std::uint64_t mask = 0; mask < n_masks; ++mask) {
    std::vector<Eigen::Index> subset;
    for (Eigen::Index j = 0; j < d; ++j)
      if (mask & (1ULL << j)) subset.push_back(j);
    double rss;
    Eigen::VectorXd coef;
    if (subset.empty()) {
      rss = data.y.squaredNorm();
      coef = Eigen::VectorXd();
    } else {
      Eigen::MatrixXd sub(data.n(), static_cast<Eigen::Index>(subset.size()));
      for (std::size_t c = 0; c < subset.size(); ++c)
        sub.col(static_cast<Eigen::Index>(c)) = data.X.col(subset[c]);
      coef = sub.householderQr().solve(data.y);
      rss = (data.y - sub * coef).squaredNorm();
    }
    const double objective =
        rss / (2.0 * n) + 0.5 * lambda * lambda * static_cast<double>(subset.size());
    if (objective < best.objective) {
      best.objective = objective;
      best.rss = rss;
      best.subset = subset;
      best.beta = Eigen::VectorXd::Zero(d);
      for (std::size_t c = 0; c < subset.size(); ++c)
        best.beta[subset[c]] = coef[static_cast<Eigen::Index>(c)];
    }
  }
  return best;
}

}  // namespace penlik
