#pragma once

#include <stdexcept>
#include <string>

namespace rotorkick {

/// Bad arguments or violated preconditions. The CLI maps these to exit code 1.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation ran but its result cannot be trusted. The CLI maps these to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NormalizationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InstabilityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace rotorkick
