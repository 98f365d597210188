#pragma once

#include <stdexcept>
#include <string>

namespace qsagnac {

// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or precondition violation on inputs.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// The data cannot identify the requested parameters.
class DegenerateDesignError : public Error {
 public:
  using Error::Error;
};

class IllConditionedError : public Error {
 public:
  using Error::Error;
};

// Optimizer failed to converge; the message carries diagnostics.
class FitError : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, std::string binding_constraint)
      : Error(what), binding_constraint_(std::move(binding_constraint)) {}

  const std::string& binding_constraint() const noexcept {
    return binding_constraint_;
  }

 private:
  std::string binding_constraint_;
};

}  // namespace qsagnac
