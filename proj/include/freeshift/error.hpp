#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace freeshift {

enum class ErrorKind { validation, resource, numeric };

/// Base class of every error raised by the library. The kind maps onto the
/// CLI exit codes (validation 2, resource 3, numeric 4).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  int exit_code() const noexcept {
    switch (kind_) {
      case ErrorKind::validation: return 2;
      case ErrorKind::resource: return 3;
      case ErrorKind::numeric: return 4;
    }
    return 1;
  }

  const char* kind_name() const noexcept {
    switch (kind_) {
      case ErrorKind::validation: return "validation";
      case ErrorKind::resource: return "resource";
      case ErrorKind::numeric: return "numeric";
    }
    return "unknown";
  }

 private:
  ErrorKind kind_;
};

/// Malformed input, violated precondition or inconsistent data file.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

/// A computation would exceed the configured memory budget.
class ResourceError : public Error {
 public:
  ResourceError(const std::string& what, std::size_t required_bytes, std::size_t budget_bytes)
      : Error(ErrorKind::resource, what + " (requires ~" + std::to_string(required_bytes) +
                                       " bytes, budget " + std::to_string(budget_bytes) + ")"),
        required_(required_bytes),
        budget_(budget_bytes) {}

  std::size_t required_bytes() const noexcept { return required_; }
  std::size_t budget_bytes() const noexcept { return budget_; }

 private:
  std::size_t required_;
  std::size_t budget_;
};

/// Non-convergence, failed bracketing, or too little data for an estimate.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what, double residual = 0.0)
      : Error(ErrorKind::numeric, what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class InsufficientDataError : public NumericError {
 public:
  using NumericError::NumericError;
};

class UndeterminedPeriodError : public NumericError {
 public:
  explicit UndeterminedPeriodError(int n_search)
      : NumericError("undetermined period: no identity-fiber word found up to length " +
                     std::to_string(n_search)),
        n_search_(n_search) {}

  int n_search() const noexcept { return n_search_; }

 private:
  int n_search_;
};

}  // namespace freeshift
