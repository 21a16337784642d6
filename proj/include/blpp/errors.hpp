#pragma once

#include <stdexcept>
#include <string>

namespace blpp {

// Thrown when an internal cross-check that must hold by construction fails
// (e.g. the two last-passage constructions disagree beyond accumulated
// rounding, or a decomposition produces a decreasing compensator).
class ContractViolation : public std::runtime_error {
 public:
  explicit ContractViolation(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a quantity is requested outside the sizes the numerics are
// rated for (matrix orders, recursion depths, point counts).
class UnsupportedSize : public std::invalid_argument {
 public:
  explicit UnsupportedSize(const std::string& what) : std::invalid_argument(what) {}
};

// Thrown when a ratio or determinant is evaluated in a regime where the
// linear algebra has lost too many digits to trust the result. Carries the
// pivot-ratio diagnostic so callers can report how degenerate the point was.
class NumericalDegeneracy : public std::runtime_error {
 public:
  NumericalDegeneracy(const std::string& what, double condition_hint)
      : std::runtime_error(what), condition_hint_(condition_hint) {}
  double condition_hint() const noexcept { return condition_hint_; }

 private:
  double condition_hint_;
};

}  // namespace blpp
