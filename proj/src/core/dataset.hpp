#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace penlik {

enum class Family { Gaussian, Logistic, Poisson };

Family family_from_string(const std::string& name);
std::string to_string(Family family);

// Design matrix plus response. Immutable after construction; validation runs
// in the constructor so downstream code can assume a well-formed instance.
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;

  Dataset() = default;
  Dataset(Eigen::MatrixXd x, Eigen::VectorXd y_in);

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index d() const { return X.cols(); }

  void validate_for(Family family) const;
  // {-1,+1} labels mapped to {0,1}; anything else rejected.
  static Eigen::VectorXd to_binary01(const Eigen::VectorXd& labels);
};

// Right-censored survival sample: observed time Z = min(T, C) and status
// delta = I(T <= C).
struct SurvivalData {
  Eigen::MatrixXd X;
  Eigen::VectorXd time;
  Eigen::VectorXi status;

  SurvivalData() = default;
  SurvivalData(Eigen::MatrixXd x, Eigen::VectorXd t, Eigen::VectorXi s);

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index d() const { return X.cols(); }
  Eigen::Index n_failures() const { return status.cast<int>().sum(); }
};

// CSV: header row, one observation per row, full double precision.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& values);
std::pair<std::vector<std::string>, Eigen::MatrixXd> read_csv(const std::string& path);

// Regression layout "y,x1..xd"; survival layout "time,status,x1..xd".
Dataset read_dataset_csv(const std::string& path);
void write_dataset_csv(const std::string& path, const Dataset& data);
SurvivalData read_survival_csv(const std::string& path);
void write_survival_csv(const std::string& path, const SurvivalData& data);

std::string format_double(double v);

}  // namespace penlik
