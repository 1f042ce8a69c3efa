#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ciforge {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or contract-violating input (files, flags, matrices).
class InputError : public Error {
 public:
  using Error::Error;
};

/// The data are well formed but an estimate cannot be produced from them.
class EstimationError : public Error {
 public:
  using Error::Error;
};

/// A metric is undefined on the given samples (e.g. AUC with one class).
class DegenerateMetricError : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

/// A fold on which the metric is undefined.
class DegenerateFoldError : public EstimationError {
 public:
  DegenerateFoldError(std::size_t fold, const std::string& what)
      : EstimationError(what), fold_(fold) {}

  std::size_t fold() const noexcept { return fold_; }

 private:
  std::size_t fold_;
};

/// Too many bootstrap draws were rejected.
class RedrawBudgetExhausted : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

}  // namespace ciforge
