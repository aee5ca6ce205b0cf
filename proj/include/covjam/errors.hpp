#pragma once

#include <stdexcept>
#include <string>

namespace covjam {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (non-positive distance, a <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Exact subset enumeration was asked for more helpers than it supports.
class CapacityExceeded : public Error {
 public:
  using Error::Error;
};

/// An iterative kernel ran out of its subdivision/iteration budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// A root search was started on an interval without a sign change.
class NoBracket : public Error {
 public:
  using Error::Error;
};

/// The covertness constraint cannot be met for the given configuration.
class Infeasible : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration; carries the offending field name.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace covjam
