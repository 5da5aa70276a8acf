// Shared aliases, constants and error types.
#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypsmap {

using Complex = std::complex<double>;
using RVec = std::vector<double>;
using CVec = std::vector<Complex>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid argument / precondition violation.
struct InvalidInput : Error {
  explicit InvalidInput(const std::string& what) : Error(what) {}
};

/// A numerical procedure failed (solver breakdown, non-convergent
/// quadrature, constraint collapse).  `where` carries the radius or
/// abscissa at which the failure was detected, when meaningful.
struct NumericalFailure : Error {
  NumericalFailure(const std::string& what, double where_ = 0.0)
      : Error(what), where(where_) {}
  double where;
};

}  // namespace hypsmap
