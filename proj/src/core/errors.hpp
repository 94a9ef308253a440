#pragma once

#include <stdexcept>
#include <string>

namespace penlik {

// Contract violations: bad arguments, dimension mismatches, domain errors.
class InvalidArgument : public std::invalid_argument {
 public:
  explicit InvalidArgument(const std::string& msg) : std::invalid_argument(msg) {}
};

// Numerical failures: singular systems, non-convergence where hard failure is required.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace penlik
