#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dsm {

enum class ErrorKind {
  GridMismatch,
  InvalidArgument,
  SolveFailed,
  NoDerivative,
  NonConvergence,
  NoRoot,
  BudgetExceeded,
  InvalidConfig,
  ConstraintViolated,
  InvalidStepSize,
  PreconditionFailed,
  BoundViolated,
  DegenerateNoise,
  ConfigError,
  IoError,
};

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;

/// Library exception. `kind()` identifies the failure class so callers
/// (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace dsm
