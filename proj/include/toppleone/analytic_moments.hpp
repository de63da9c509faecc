#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "toppleone/common.hpp"
#include "toppleone/distribution.hpp"
#include "toppleone/quadrature.hpp"
#include "toppleone/special_functions.hpp"

namespace toppleone {

/// Arguments of a moment E([estimator(x)]^r) under sample size n and shape
/// alpha.
struct MomentQuery {
  int r;
  int n;
  double alpha;
  UnitPoint x;
};

namespace detail {

inline void check_query(const MomentQuery& q) {
  if (q.r < 1) throw std::domain_error("MomentQuery: moment order r must be >= 1");
  if (q.n < 1) throw std::domain_error("MomentQuery: sample size n must be >= 1");
  if (!(q.alpha > 0.0) || !std::isfinite(q.alpha))
    throw std::domain_error("MomentQuery: alpha must be positive and finite");
}

}  // namespace detail

/// ln E([f-hat(x)]^r) for the MLE-based density estimator. The closed form
/// couples a power of -1/(r ln g) with K_{r-n} at 2 sqrt(-n alpha r ln g);
/// every factor is assembled in log space since (n alpha)^{(r+n)/2}/Gamma(n)
/// leaves double range long before the value itself does.
inline double log_mle_pdf_moment(const MomentQuery& q) {
  detail::check_query(q);
  const double gx = g(q.x);
  const double b = std::log(gx);  // < 0
  if (b == 0.0)
    throw std::overflow_error(
        "mle moment: x so close to 1 that the Bessel argument vanishes");
  const double na = q.n * q.alpha;
  const double arg = 2.0 * std::sqrt(-na * q.r * b);
  return std::log(2.0) + 0.5 * (q.r + q.n) * std::log(na) +
         q.r * std::log(2.0 - 2.0 * q.x.value()) - ln_gamma(q.n) -
         q.r * b + 0.5 * (q.r - q.n) * std::log(-1.0 / (q.r * b)) +
         log_bessel_k(q.r - q.n, arg);
}

/// ln E([F-hat(x)]^r) for the MLE-based CDF estimator (order -n Bessel term,
/// no 2-2x factor).
inline double log_mle_cdf_moment(const MomentQuery& q) {
  detail::check_query(q);
  const double b = std::log(g(q.x));
  if (b == 0.0)
    throw std::overflow_error(
        "mle moment: x so close to 1 that the Bessel argument vanishes");
  const double na = q.n * q.alpha;
  const double arg = 2.0 * std::sqrt(-na * q.r * b);
  return std::log(2.0) + 0.5 * q.n * std::log(na) - ln_gamma(q.n) -
         0.5 * q.n * std::log(-1.0 / (q.r * b)) + log_bessel_k(-q.n, arg);
}

inline double mle_pdf_moment(const MomentQuery& q) {
  const double l = log_mle_pdf_moment(q);
  if (l > detail::kLogDoubleMax)
    throw std::overflow_error("mle_pdf_moment: result exceeds double range");
  return std::exp(l);
}

inline double mle_cdf_moment(const MomentQuery& q) {
  const double l = log_mle_cdf_moment(q);
  if (l > detail::kLogDoubleMax)
    throw std::overflow_error("mle_cdf_moment: result exceeds double range");
  return std::exp(l);
}

/// MSE of the MLE-based density estimator: E[f-hat^2] - 2 f E[f-hat] + f^2.
inline double mle_pdf_mse(int n, double alpha, UnitPoint x) {
  const double m1 = mle_pdf_moment({1, n, alpha, x});
  const double m2 = mle_pdf_moment({2, n, alpha, x});
  const double fx = pdf(ShapeParam(alpha), x);
  return m2 - 2.0 * fx * m1 + fx * fx;
}

/// MSE of the MLE-based CDF estimator.
inline double mle_cdf_mse(int n, double alpha, UnitPoint x) {
  const double m1 = mle_cdf_moment({1, n, alpha, x});
  const double m2 = mle_cdf_moment({2, n, alpha, x});
  const double Fx = cdf(ShapeParam(alpha), x);
  return m2 - 2.0 * Fx * m1 + Fx * Fx;
}

namespace detail {

struct SeriesEval {
  double value;
  double cancellation;  // sum|term| / |sum|
  bool degraded;        // any incomplete-gamma factor flagged
};

// Finite binomial expansion of the UMVUE second moment. The sum starts at
// i = 0 (the expansion of (1+b/t)^m includes the constant term) and carries
// alpha^{i+offset} with offset = 2 for the density, 0 for the CDF; both
// follow from the substitution u = alpha t in the defining integral.
// Signs alternate through b^i (b < 0), so terms are accumulated as
// sign * exp(log-magnitude) under Kahan compensation.
inline SeriesEval umvue_m2_series(int m, int alpha_offset, int gamma_s_base,
                                  double ln_scale, double alpha, double b) {
  const double lab = std::log(-b);
  const double la = std::log(alpha);
  std::vector<double> lt(m + 1);
  std::vector<int> sign(m + 1);
  bool degraded = false;
  double lmax = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= m; ++i) {
    const auto G = upper_inc_gamma(gamma_s_base - i, -alpha * b);
    degraded = degraded || G.degraded;
    lt[i] = ln_binomial(m, i) + i * lab + (i + alpha_offset) * la + std::log(G.value);
    sign[i] = (i % 2 == 0) ? 1 : -1;
    lmax = std::max(lmax, lt[i]);
  }
  double sum = 0.0, comp = 0.0, sum_abs = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double term = sign[i] * std::exp(lt[i] - lmax);
    sum_abs += std::abs(term);
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  const double value = std::exp(ln_scale + lmax) * sum;
  const double cancel = sum_abs / std::max(std::abs(sum), 1e-300);
  return {value, cancel, degraded};
}

inline constexpr int kSeriesMaxN = 30;

}  // namespace detail

/// Result of a UMVUE mean-squared-error evaluation. `mse` is always backed
/// by adaptive quadrature of the exact second-moment integral; the binomial
/// series value is carried alongside for cross-checking when the sample size
/// is small enough for it to be evaluable.
struct UmvueMse {
  double mse;                   // quadrature-backed, authoritative
  double second_moment;         // E[estimate^2] by quadrature
  std::optional<double> series_second_moment;
  bool series_clean;            // internal cancellation diagnostic passed
  bool series_consistent;       // series agrees with quadrature to 1e-6 rel
};

namespace detail {

inline UmvueMse umvue_mse_impl(int n, double alpha, UnitPoint x, bool density) {
  if (n < 3) throw std::domain_error("umvue mse: requires n >= 3");
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::domain_error("umvue mse: alpha must be positive and finite");
  const double gx = g(x);
  const double b = std::log(gx);
  const double A = (n - 1) * (2.0 - 2.0 * x.value()) / gx;

  // E[estimate^2] = alpha^n pre / Gamma(n) * int_{-b}^inf (1+b/t)^m t^p e^{-alpha t} dt
  const int m = density ? 2 * n - 4 : 2 * n - 2;
  const double lnpre = n * std::log(alpha) - ln_gamma(n) +
                       (density ? 2.0 * std::log(A) : 0.0);
  auto integrand = [=](double t) {
    const double u = t + b;
    if (u <= 0.0 || t <= 0.0) return 0.0;
    return std::exp(lnpre + m * std::log(u) - (n - 1.0) * std::log(t) - alpha * t);
  };
  auto r = quad::integrate_to_inf(integrand, -b, 1e-10,
                                  std::max(1.0, 0.5 * n / alpha));
  if (!r.converged)
    throw ConvergenceError("umvue mse: second-moment quadrature did not converge");
  const double m2 = r.value;
  const double target = density ? pdf(ShapeParam(alpha), x) : cdf(ShapeParam(alpha), x);

  UmvueMse out{m2 - target * target, m2, std::nullopt, false, false};
  if (n <= detail::kSeriesMaxN) {
    const auto se = detail::umvue_m2_series(m, density ? 2 : 0, density ? n - 2 : n,
                                            lnpre - n * std::log(alpha), alpha, b);
    out.series_second_moment = se.value;
    out.series_clean = !se.degraded && se.cancellation * 1e-15 < 1e-7;
    out.series_consistent =
        std::abs(se.value - m2) <= 1e-6 * std::abs(m2);
  }
  return out;
}

}  // namespace detail

/// MSE of the UMVUE density estimator at x.
inline UmvueMse umvue_pdf_mse(int n, double alpha, UnitPoint x) {
  return detail::umvue_mse_impl(n, alpha, x, true);
}

/// MSE of the UMVUE CDF estimator at x.
inline UmvueMse umvue_cdf_mse(int n, double alpha, UnitPoint x) {
  return detail::umvue_mse_impl(n, alpha, x, false);
}

}  // namespace toppleone
