#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace toppleone {

/// Thrown when an iterative numeric routine exhausts its evaluation budget.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

// Largest x with exp(x) finite in double precision.
inline constexpr double kLogDoubleMax = 709.782712893384;

inline bool is_finite(double v) noexcept { return std::isfinite(v); }

}  // namespace detail

}  // namespace toppleone
