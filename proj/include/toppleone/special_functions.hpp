#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "toppleone/common.hpp"
#include "toppleone/quadrature.hpp"

namespace toppleone {

/// Natural log of the gamma function for s > 0.
inline double ln_gamma(double s) {
  if (!(s > 0.0) || !std::isfinite(s))
    throw std::domain_error("ln_gamma: argument must be positive and finite");
  return std::lgamma(s);
}

/// ln C(m, k). Out-of-range k (k < 0 or k > m) signals a zero coefficient by
/// returning -infinity, which exponentiates to an exact 0.
inline double ln_binomial(long long m, long long k) {
  if (m < 0) throw std::domain_error("ln_binomial: m must be nonnegative");
  if (k < 0 || k > m) return -std::numeric_limits<double>::infinity();
  return std::lgamma(static_cast<double>(m) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(m - k) + 1.0);
}

namespace detail {

inline double log_cosh(double y) noexcept {
  y = std::abs(y);
  if (y > 20.0) return y - 0.6931471805599453 + std::log1p(std::exp(-2.0 * y));
  return std::log(std::cosh(y));
}

// Integrand exponent for K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt.
inline double bessel_phi(double anu, double z, double t) noexcept {
  return -z * std::cosh(t) + log_cosh(anu * t);
}

inline double bessel_phi_deriv(double anu, double z, double t) noexcept {
  return -z * std::sinh(t) + anu * std::tanh(anu * t);
}

}  // namespace detail

/// ln K_nu(z) for real order nu (K_{-nu} = K_nu) and z > 0, by adaptive
/// quadrature of the integral representation int_0^inf e^{-z cosh t}
/// cosh(nu t) dt, normalized at the integrand peak so that extreme orders
/// (|nu| ~ 200 at tiny z) stay representable.
inline double log_bessel_k(double nu, double z) {
  if (!(z > 0.0) || !std::isfinite(z) || !std::isfinite(nu))
    throw std::domain_error("log_bessel_k: requires finite nu and z > 0");
  const double anu = std::abs(nu);

  // Peak of phi(t): t = 0 when anu^2 <= z, else the root of phi'(t) = 0,
  // bracketed by asinh(anu/z) since z sinh(t) = anu tanh(anu t) <= anu.
  double tpeak = 0.0;
  if (anu * anu > z) {
    double lo = 0.0, hi = std::asinh(anu / z) + 1.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (detail::bessel_phi_deriv(anu, z, mid) > 0.0)
        lo = mid;
      else
        hi = mid;
      if (hi - lo < 1e-13 * (1.0 + hi)) break;
    }
    tpeak = 0.5 * (lo + hi);
  }
  const double peak_log = detail::bessel_phi(anu, z, tpeak);

  // Truncate where the integrand has dropped ~e^-48 below the peak.
  double tmax = tpeak + 1.0;
  while (detail::bessel_phi(anu, z, tmax) > peak_log - 48.0 && tmax < 750.0)
    tmax = tmax * 1.5 + 0.5;

  auto scaled = [&](double t) {
    return std::exp(detail::bessel_phi(anu, z, t) - peak_log);
  };
  auto r = quad::integrate(scaled, 0.0, tmax, 1e-13, 0.0, 6000, 32);
  if (!r.converged)
    throw ConvergenceError("log_bessel_k: quadrature did not converge");
  return peak_log + std::log(r.value);
}

/// K_nu(z). Signals overflow for arguments whose value exceeds double range
/// (small z with large |nu|).
inline double bessel_k(double nu, double z) {
  const double lk = log_bessel_k(nu, z);
  if (lk > detail::kLogDoubleMax)
    throw std::overflow_error("bessel_k: result exceeds double range");
  return std::exp(lk);
}

/// Value of the upper (complementary) incomplete gamma function together
/// with a flag reporting whether the s <= 0 downward recurrence lost more
/// than ~1e-6 of relative accuracy to cancellation.
struct IncGamma {
  double value;
  bool degraded;
};

namespace detail {

inline constexpr double kEulerGamma = 0.5772156649015328606;

// Regularized lower incomplete gamma P(s,x) by series; valid for x < s + 1.
inline double gamma_p_series(double s, double x) {
  double ap = s;
  double sum = 1.0 / s;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 2e-16)
      return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
  }
  throw ConvergenceError("upper_inc_gamma: series did not converge");
}

// Unregularized Gamma(s,x) by the Legendre continued fraction (modified
// Lentz), good for x > s + 1 and any s <= x - 1, including s <= 0.
inline double gamma_upper_cf(double s, double x) {
  constexpr double fpmin = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / fpmin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) <= 3e-16)
      return std::exp(-x + s * std::log(x)) * h;
  }
  throw ConvergenceError("upper_inc_gamma: continued fraction did not converge");
}

// Exponential integral E1(x) = Gamma(0, x).
inline double exp_int_e1(double x) {
  if (x > 1.0) return gamma_upper_cf(0.0, x);
  double sum = 0.0;
  double term = 1.0;
  for (int k = 1; k <= 60; ++k) {
    term *= -x / k;
    sum -= term / k;
    if (std::abs(term) < 1e-18 * (std::abs(sum) + 1.0)) break;
  }
  return -kEulerGamma - std::log(x) + sum;
}

// Gamma(s, x) for s > 0.
inline double gamma_upper_pos(double s, double x) {
  if (x < s + 1.0) {
    const double p = gamma_p_series(s, x);
    return std::exp(std::lgamma(s) + std::log1p(-p));
  }
  return gamma_upper_cf(s, x);
}

}  // namespace detail

/// Upper incomplete gamma Gamma(s, x) = int_x^inf t^{s-1} e^{-t} dt for
/// x > 0 and any real s. For s <= 0 the value follows the downward
/// recurrence Gamma(s, x) = (Gamma(s+1, x) - x^s e^{-x}) / s from a positive
/// starting index (integer s start from Gamma(0, x) = E1(x)); the running
/// cancellation estimate sets `degraded` when it exceeds 1e-6 relative.
inline IncGamma upper_inc_gamma(double s, double x) {
  if (!(x > 0.0) || !std::isfinite(x) || !std::isfinite(s))
    throw std::domain_error("upper_inc_gamma: requires finite s and x > 0");
  if (s > 0.0) return {detail::gamma_upper_pos(s, x), false};

  const bool integral_s = (s == std::floor(s));
  double cur;        // Gamma(t_base, x)
  double t_base;     // current parameter of `cur`
  double rel_err;    // running relative error estimate
  if (integral_s) {
    cur = detail::exp_int_e1(x);
    t_base = 0.0;
    rel_err = 4e-16;
  } else {
    t_base = s + std::ceil(-s) + 1.0;  // in (1, 2)
    cur = detail::gamma_upper_pos(t_base, x);
    rel_err = 4e-16;
  }
  const double lx = std::log(x);
  for (double t = t_base - 1.0; t > s - 0.5; t -= 1.0) {
    const double p = std::exp(t * lx - x);  // x^t e^{-x}
    const double diff = cur - p;
    rel_err = (std::abs(cur) * rel_err + std::abs(p) * 3e-16) /
                  std::max(std::abs(diff), 1e-300) +
              2e-16;
    cur = diff / t;
  }
  if (!std::isfinite(cur))
    throw std::overflow_error("upper_inc_gamma: intermediate overflow");
  return {cur, rel_err > 1e-6};
}

}  // namespace toppleone
