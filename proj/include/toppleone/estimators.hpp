#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "toppleone/common.hpp"
#include "toppleone/distribution.hpp"

namespace toppleone {

enum class EstimatorKind { mle, umvue, pce, lse, wlse };

/// An i.i.d. sample of observations strictly inside (0,1).
class Sample {
 public:
  explicit Sample(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::domain_error("Sample: needs at least one observation");
    for (double v : values_)
      if (!(v > 0.0) || !(v < 1.0))
        throw std::domain_error("Sample: observations must lie strictly in (0,1)");
  }
  explicit Sample(const std::vector<UnitPoint>& points) {
    if (points.empty()) throw std::domain_error("Sample: needs at least one observation");
    values_.reserve(points.size());
    for (const auto& p : points) values_.push_back(p.value());
  }

  std::span<const double> values() const noexcept { return values_; }
  int size() const noexcept { return static_cast<int>(values_.size()); }

 private:
  std::vector<double> values_;
};

/// Order statistics of a sample together with the quantities the percentile
/// and least-squares objectives need: g_i = g(x_(i)), the plotting positions
/// p_i = i/(n+1), and the inverse-variance weights of F(X_(i)).
class OrderedSample {
 public:
  explicit OrderedSample(const Sample& s) {
    const int n = s.size();
    sorted_.assign(s.values().begin(), s.values().end());
    std::stable_sort(sorted_.begin(), sorted_.end());
    g_.resize(n);
    log_g_.resize(n);
    p_.resize(n);
    log_p_.resize(n);
    w_.resize(n);
    for (int i = 0; i < n; ++i) {
      g_[i] = sorted_[i] * (2.0 - sorted_[i]);
      log_g_[i] = std::log(g_[i]);
      p_[i] = static_cast<double>(i + 1) / (n + 1);
      log_p_[i] = std::log(p_[i]);
      w_[i] = static_cast<double>(n + 2) * (n + 1) * (n + 1) /
              (static_cast<double>(i + 1) * (n - i));
    }
  }

  int size() const noexcept { return static_cast<int>(sorted_.size()); }
  std::span<const double> values() const noexcept { return sorted_; }
  std::span<const double> g_values() const noexcept { return g_; }
  std::span<const double> log_g() const noexcept { return log_g_; }
  std::span<const double> plotting_positions() const noexcept { return p_; }
  std::span<const double> log_p() const noexcept { return log_p_; }
  std::span<const double> wls_weights() const noexcept { return w_; }

 private:
  std::vector<double> sorted_, g_, log_g_, p_, log_p_, w_;
};

/// A fit that reduces to plugging alpha-hat into the parametric pdf/cdf.
struct ShapeFit {
  double alpha_hat;
  EstimatorKind method;
};

/// The Rao-Blackwell fit: the complete sufficient statistic t plus the
/// sample size. Meaningful only for n >= 3 (the density estimator's exponent
/// n-2 degenerates below that).
class UmvueFit {
 public:
  UmvueFit(double t, int n) : t_(t), n_(n) {
    if (!(t > 0.0) || !std::isfinite(t))
      throw std::domain_error("UmvueFit: t must be positive and finite");
    if (n < 3) throw std::domain_error("UmvueFit: requires n >= 3");
  }
  double t() const noexcept { return t_; }
  int n() const noexcept { return n_; }

 private:
  double t_;
  int n_;
};

using FittedCurve = std::variant<ShapeFit, UmvueFit>;

/// T = -sum ln(2x_i - x_i^2), the complete sufficient statistic for alpha.
inline double sufficient_statistic(const Sample& s) {
  double t = 0.0;
  for (double v : s.values()) t -= std::log(v * (2.0 - v));
  return t;
}

/// Maximum likelihood: alpha-hat = n / T.
inline ShapeFit mle(const Sample& s) {
  return {s.size() / sufficient_statistic(s), EstimatorKind::mle};
}

inline UmvueFit umvue(const Sample& s) {
  return UmvueFit(sufficient_statistic(s), s.size());
}

/// Percentile objective: sum_i (p_i^{1/alpha} - g_i)^2.
inline double pce_objective(double alpha, const OrderedSample& os) {
  double acc = 0.0;
  const auto lp = os.log_p();
  const auto gv = os.g_values();
  for (int i = 0; i < os.size(); ++i) {
    const double r = std::exp(lp[i] / alpha) - gv[i];
    acc += r * r;
  }
  return acc;
}

/// Least-squares objective: sum_i (g_i^alpha - p_i)^2.
inline double lse_objective(double alpha, const OrderedSample& os) {
  double acc = 0.0;
  const auto lg = os.log_g();
  const auto p = os.plotting_positions();
  for (int i = 0; i < os.size(); ++i) {
    const double r = std::exp(alpha * lg[i]) - p[i];
    acc += r * r;
  }
  return acc;
}

/// Weighted least-squares objective with w_i = (n+2)(n+1)^2 / (i (n-i+1)).
inline double wlse_objective(double alpha, const OrderedSample& os) {
  double acc = 0.0;
  const auto lg = os.log_g();
  const auto p = os.plotting_positions();
  const auto w = os.wls_weights();
  for (int i = 0; i < os.size(); ++i) {
    const double r = std::exp(alpha * lg[i]) - p[i];
    acc += w[i] * r * r;
  }
  return acc;
}

/// Brent's bounded scalar minimizer: golden-section steps refined by
/// parabolic interpolation. Returns a point within ~tol of a local minimizer
/// (the global one when the objective is unimodal on [lo, hi]); a monotone
/// objective converges to the corresponding boundary.
template <class F>
double minimize_scalar(F&& f, double lo, double hi, double tol) {
  if (!(lo < hi)) throw std::invalid_argument("minimize_scalar: requires lo < hi");
  if (!(tol > 0.0)) throw std::invalid_argument("minimize_scalar: requires tol > 0");
  constexpr double golden = 0.3819660112501051;  // 2 - phi
  constexpr std::uint64_t max_evals = 1000000;
  const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());

  double a = lo, b = hi;
  double x = a + golden * (b - a), w = x, v = x;
  double fx = f(x), fw = fx, fv = fx;
  std::uint64_t evals = 1;
  double d = 0.0, e = 0.0;

  for (;;) {
    const double m = 0.5 * (a + b);
    const double tol1 = sqrt_eps * std::abs(x) + tol / 3.0;
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - m) <= tol2 - 0.5 * (b - a)) return x;

    bool take_golden = true;
    if (std::abs(e) > tol1) {
      // Parabola through (v,fv), (w,fw), (x,fx).
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double e_prev = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * e_prev) && p > q * (a - x) &&
          p < q * (b - x)) {
        d = p / q;
        const double u_try = x + d;
        if (u_try - a < tol2 || b - u_try < tol2) d = (x < m) ? tol1 : -tol1;
        take_golden = false;
      }
    }
    if (take_golden) {
      e = (x < m) ? b - x : a - x;
      d = golden * e;
    }

    const double u = x + ((std::abs(d) >= tol1) ? d : (d > 0.0 ? tol1 : -tol1));
    const double fu = f(u);
    if (++evals > max_evals)
      throw ConvergenceError("minimize_scalar: evaluation cap exceeded");

    if (fu <= fx) {
      if (u < x) b = x; else a = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
}

namespace detail {

inline constexpr double kAlphaTol = 1e-8;

// Minimizes `obj` over alpha, bracketing around the MLE point and doubling a
// boundary outward whenever the minimizer lands on it.
template <class Obj>
ShapeFit fit_by_minimization(const Sample& s, EstimatorKind kind, Obj&& obj) {
  const double seed = mle(s).alpha_hat;
  double lo = seed / 100.0;
  double hi = seed * 100.0;
  double best = seed;
  for (int round = 0; round < 60; ++round) {
    best = minimize_scalar(obj, lo, hi, kAlphaTol);
    const double margin =
        8.0 * (std::sqrt(std::numeric_limits<double>::epsilon()) * std::abs(best) +
               kAlphaTol);
    const bool at_lo = best - lo <= margin;
    const bool at_hi = hi - best <= margin;
    if (!at_lo && !at_hi) break;
    if (at_lo) lo = std::max(lo * 0.5, 1e-300);
    if (at_hi) hi *= 2.0;
  }
  return {best, kind};
}

}  // namespace detail

inline ShapeFit pce(const Sample& s) {
  OrderedSample os(s);
  return detail::fit_by_minimization(
      s, EstimatorKind::pce, [&os](double a) { return pce_objective(a, os); });
}

inline ShapeFit lse(const Sample& s) {
  OrderedSample os(s);
  return detail::fit_by_minimization(
      s, EstimatorKind::lse, [&os](double a) { return lse_objective(a, os); });
}

inline ShapeFit wlse(const Sample& s) {
  OrderedSample os(s);
  return detail::fit_by_minimization(
      s, EstimatorKind::wlse, [&os](double a) { return wlse_objective(a, os); });
}

inline FittedCurve fit(EstimatorKind kind, const Sample& s) {
  switch (kind) {
    case EstimatorKind::mle: return mle(s);
    case EstimatorKind::umvue: return umvue(s);
    case EstimatorKind::pce: return pce(s);
    case EstimatorKind::lse: return lse(s);
    case EstimatorKind::wlse: return wlse(s);
  }
  throw std::invalid_argument("fit: unknown estimator kind");
}

/// Fitted density estimate at x. The shape-based fits plug alpha-hat into
/// the parametric density; the UMVUE form is
/// (n-1)(2-2x)(t+b)^{n-2} / ((2x-x^2) t^{n-1}) with b = ln(2x-x^2),
/// identically 0 outside its support t + b > 0.
inline double curve_pdf(const FittedCurve& fc, UnitPoint x) {
  if (const auto* sf = std::get_if<ShapeFit>(&fc))
    return pdf(ShapeParam(sf->alpha_hat), x);
  const auto& uf = std::get<UmvueFit>(fc);
  const double gx = g(x);
  const double b = std::log(gx);
  const double u = uf.t() + b;
  if (u <= 0.0) return 0.0;
  const int n = uf.n();
  return (n - 1) * (2.0 - 2.0 * x.value()) / gx *
         std::exp((n - 2) * std::log(u) - (n - 1) * std::log(uf.t()));
}

/// Fitted CDF estimate at x; the UMVUE form is ((t+b)/t)^{n-1} on t+b > 0.
inline double curve_cdf(const FittedCurve& fc, UnitPoint x) {
  if (const auto* sf = std::get_if<ShapeFit>(&fc))
    return cdf(ShapeParam(sf->alpha_hat), x);
  const auto& uf = std::get<UmvueFit>(fc);
  const double u = uf.t() + std::log(g(x));
  if (u <= 0.0) return 0.0;
  return std::exp((uf.n() - 1) * (std::log(u) - std::log(uf.t())));
}

}  // namespace toppleone
