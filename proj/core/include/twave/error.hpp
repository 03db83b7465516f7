#pragma once

#include <stdexcept>
#include <string>

namespace twave {

/// Bad input: malformed parameters, violated preconditions, schema problems.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// The numerics have no answer for the given inputs (no root, divergent
/// transform, empty regression window, ...).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace twave
