#pragma once

#include <stdexcept>
#include <string>

namespace walkbound {

// Failure categories. Each maps onto one CLI exit code.
enum class ErrorKind {
  Config = 2,
  Convergence = 3,
  Budget = 4,
  TruncationOverflow = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

// Operands built over different ranks (or acting kinds) were combined.
class RankMismatch : public ConfigError {
 public:
  explicit RankMismatch(const std::string& what) : ConfigError("rank mismatch: " + what) {}
};

class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& what) : Error(ErrorKind::Convergence, what) {}
};

class BudgetError : public Error {
 public:
  explicit BudgetError(const std::string& what) : Error(ErrorKind::Budget, what) {}
};

// Cancellation ate into the requested prefix; retry with a larger margin.
class TruncationOverflow : public Error {
 public:
  explicit TruncationOverflow(const std::string& what)
      : Error(ErrorKind::TruncationOverflow, what) {}
};

}  // namespace walkbound
