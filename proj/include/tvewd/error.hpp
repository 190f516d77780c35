#pragma once

#include <stdexcept>
#include <string>

namespace tvewd {

/// Precondition or input-range violation (bad lengths, out-of-range parameters).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure while fitting (singular local design, explosive dynamics).
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Wraps an error with the pipeline stage that raised it, e.g. "trend", "weights".
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace tvewd
