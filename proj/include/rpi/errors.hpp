#ifndef RPI_ERRORS_HPP
#define RPI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rpi {

// Input violates a physical precondition (non-positive length, Δx > l, ...).
class ConstraintError : public std::invalid_argument {
 public:
  explicit ConstraintError(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical construction failed: divergent integral, singular or
// ill-conditioned form, degenerate fit.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Command line or configuration could not be parsed.
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace rpi

#endif  // RPI_ERRORS_HPP
