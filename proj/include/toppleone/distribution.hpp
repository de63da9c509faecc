#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "toppleone/common.hpp"

namespace toppleone {

/// Positive shape parameter alpha of the Topp-Leone law.
class ShapeParam {
 public:
  explicit ShapeParam(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
      throw std::domain_error("ShapeParam: alpha must be positive and finite");
  }
  double value() const noexcept { return alpha_; }

 private:
  double alpha_;
};

/// A point strictly inside the unit interval (0, 1).
class UnitPoint {
 public:
  explicit UnitPoint(double x) : x_(x) {
    if (!(x > 0.0) || !(x < 1.0))
      throw std::domain_error("UnitPoint: x must lie in the open interval (0,1)");
  }
  double value() const noexcept { return x_; }

 private:
  double x_;
};

/// g(x) = 2x - x^2, the base of both the density and the CDF; strictly
/// increasing from 0 to 1 on (0, 1).
inline double g(UnitPoint x) noexcept {
  const double v = x.value();
  return v * (2.0 - v);
}

/// Density alpha (2-2x) (2x-x^2)^{alpha-1}, evaluated through the log of the
/// base so that exponents far from 1 neither underflow nor overflow.
inline double pdf(ShapeParam p, UnitPoint x) {
  const double a = p.value();
  const double xv = x.value();
  return a * (2.0 - 2.0 * xv) * std::exp((a - 1.0) * std::log(g(x)));
}

/// CDF (2x - x^2)^alpha.
inline double cdf(ShapeParam p, UnitPoint x) {
  return std::exp(p.value() * std::log(g(x)));
}

/// Inverse CDF: 1 - sqrt(1 - u^{1/alpha}) for u in (0,1), written as
/// v / (1 + sqrt(1-v)) to stay accurate for v near 0. The result is nudged
/// into the open interval when rounding lands exactly on an endpoint.
inline UnitPoint quantile(ShapeParam p, double u) {
  if (!(u > 0.0) || !(u < 1.0))
    throw std::domain_error("quantile: u must lie in (0,1)");
  const double v = std::exp(std::log(u) / p.value());
  double x = v / (1.0 + std::sqrt(1.0 - v));
  if (x <= 0.0) x = std::numeric_limits<double>::min();
  if (x >= 1.0) x = std::nextafter(1.0, 0.0);
  return UnitPoint(x);
}

/// Anything callable that yields uniform variates on the open interval (0,1).
template <class S>
concept UniformSource = requires(S s) {
  { s() } -> std::convertible_to<double>;
};

/// Draws `count` i.i.d. Topp-Leone(alpha) variates by inversion.
template <UniformSource S>
std::vector<UnitPoint> sample(ShapeParam p, S&& stream, std::size_t count) {
  if (count == 0) throw std::domain_error("sample: count must be positive");
  std::vector<UnitPoint> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(quantile(p, stream()));
  return out;
}

}  // namespace toppleone
