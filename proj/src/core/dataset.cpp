#include "core/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace penlik {

Family family_from_string(const std::string& name) {
  if (name == "gaussian") return Family::Gaussian;
  if (name == "logistic" || name == "binomial") return Family::Logistic;
  if (name == "poisson") return Family::Poisson;
  throw InvalidArgument("unknown family: " + name);
}

std::string to_string(Family family) {
  switch (family) {
    case Family::Gaussian: return "gaussian";
    case Family::Logistic: return "logistic";
    case Family::Poisson: return "poisson";
  }
  return "?";
}

Dataset::Dataset(Eigen::MatrixXd x, Eigen::VectorXd y_in) : X(std::move(x)), y(std::move(y_in)) {
  if (X.rows() < 1 || X.cols() < 1) throw InvalidArgument("dataset: need n >= 1 and d >= 1");
  if (y.size() != X.rows()) throw InvalidArgument("dataset: y length must match rows of X");
  if (!X.allFinite() || !y.allFinite()) throw InvalidArgument("dataset: NaN/Inf entries");
}

void Dataset::validate_for(Family family) const {
  if (family == Family::Logistic) {
    for (Eigen::Index i = 0; i < y.size(); ++i)
      if (y[i] != 0.0 && y[i] != 1.0)
        throw InvalidArgument("logistic responses must lie in {0,1} (use to_binary01 for +-1)");
  } else if (family == Family::Poisson) {
    for (Eigen::Index i = 0; i < y.size(); ++i)
      if (y[i] < 0.0 || y[i] != std::floor(y[i]))
        throw InvalidArgument("poisson responses must be nonnegative integers");
  }
}

Eigen::VectorXd Dataset::to_binary01(const Eigen::VectorXd& labels) {
  Eigen::VectorXd out(labels.size());
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels[i] == -1.0)
      out[i] = 0.0;
    else if (labels[i] == 1.0)
      out[i] = 1.0;
    else if (labels[i] == 0.0)
      out[i] = 0.0;
    else
      throw InvalidArgument("labels must lie in {-1,+1} or {0,1}");
  }
  return out;
}

SurvivalData::SurvivalData(Eigen::MatrixXd x, Eigen::VectorXd t, Eigen::VectorXi s)
    : X(std::move(x)), time(std::move(t)), status(std::move(s)) {
  if (X.rows() < 1 || X.cols() < 1) throw InvalidArgument("survival: need n >= 1 and d >= 1");
  if (time.size() != X.rows() || status.size() != X.rows())
    throw InvalidArgument("survival: time/status length must match rows of X");
  if (!X.allFinite() || !time.allFinite()) throw InvalidArgument("survival: NaN/Inf entries");
  for (Eigen::Index i = 0; i < time.size(); ++i) {
    if (!(time[i] > 0.0)) throw InvalidArgument("survival: times must be positive");
    if (status[i] != 0 && status[i] != 1)
      throw InvalidArgument("survival: status must lie in {0,1}");
  }
  if (status.cast<int>().sum() == 0)
    throw InvalidArgument("survival: need at least one observed failure");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& values) {
  if (static_cast<Eigen::Index>(header.size()) != values.cols())
    throw InvalidArgument("write_csv: header size must match columns");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (std::size_t j = 0; j < header.size(); ++j)
    out << (j ? "," : "") << header[j];
  out << "\n";
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j)
      out << (j ? "," : "") << format_double(values(i, j));
    out << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

std::pair<std::vector<std::string>, Eigen::MatrixXd> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty csv: " + path);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) header.push_back(item);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string item;
    std::vector<double> row;
    while (std::getline(ss, item, ',')) {
      try {
        row.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw IoError("non-numeric entry '" + item + "' in " + path);
      }
    }
    if (row.size() != header.size())
      throw IoError("ragged row in " + path);
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(header.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < header.size(); ++j)
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return {header, values};
}

Dataset read_dataset_csv(const std::string& path) {
  auto [header, values] = read_csv(path);
  if (header.empty() || header[0] != "y")
    throw IoError("dataset csv must start with a 'y' column: " + path);
  if (values.cols() < 2) throw IoError("dataset csv needs at least one covariate: " + path);
  return Dataset(values.rightCols(values.cols() - 1), values.col(0));
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
  std::vector<std::string> header{"y"};
  for (Eigen::Index j = 0; j < data.d(); ++j) header.push_back("x" + std::to_string(j + 1));
  Eigen::MatrixXd values(data.n(), data.d() + 1);
  values.col(0) = data.y;
  values.rightCols(data.d()) = data.X;
  write_csv(path, header, values);
}

SurvivalData read_survival_csv(const std::string& path) {
  auto [header, values] = read_csv(path);
  if (header.size() < 3 || header[0] != "time" || header[1] != "status")
    throw IoError("survival csv must start with 'time,status': " + path);
  Eigen::VectorXi status(values.rows());
  for (Eigen::Index i = 0; i < values.rows(); ++i)
    status[i] = static_cast<int>(values(i, 1));
  return SurvivalData(values.rightCols(values.cols() - 2), values.col(0), status);
}

void write_survival_csv(const std::string& path, const SurvivalData& data) {
  std::vector<std::string> header{"time", "status"};
  for (Eigen::Index j = 0; j < data.d(); ++j) header.push_back("x" + std::to_string(j + 1));
  Eigen::MatrixXd values(data.n(), data.d() + 2);
  values.col(0) = data.time;
  values.col(1) = data.status.cast<double>();
  values.rightCols(data.d()) = data.X;
  write_csv(path, header, values);
}

}  // namespace penlik
