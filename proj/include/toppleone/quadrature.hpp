#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

#include "toppleone/common.hpp"

namespace toppleone::quad {

struct IntegralResult {
  double value = 0.0;
  double abs_error = 0.0;
  bool converged = false;
};

namespace detail {

// Kronrod-15 abscissae with embedded Gauss-7 rule (QUADPACK dqk15 constants).
inline constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
inline constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double flo[7], fhi[7];
  double resk = kWgk[7] * fc;
  double resg = kWg[3] * fc;
  double resabs = kWgk[7] * std::abs(fc);
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kXgk[i];
    flo[i] = f(c - dx);
    fhi[i] = f(c + dx);
    resk += kWgk[i] * (flo[i] + fhi[i]);
    resabs += kWgk[i] * (std::abs(flo[i]) + std::abs(fhi[i]));
    if (i % 2 == 1) resg += kWg[i / 2] * (flo[i] + fhi[i]);
  }
  // QUADPACK dqk15 error sharpening via the deviation integral resasc.
  const double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int i = 0; i < 7; ++i)
    resasc += kWgk[i] * (std::abs(flo[i] - reskh) + std::abs(fhi[i] - reskh));
  resasc *= std::abs(h);
  resabs *= std::abs(h);
  const double value = resk * h;
  double err = std::abs((resk - resg) * h);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps50 = 50.0 * std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / eps50)
    err = std::max(eps50 * resabs, err);
  return {a, b, value, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of f on the finite interval
/// [a, b]. Bisects the segment with the largest error estimate until the
/// accumulated error satisfies the tolerances or the segment cap is hit.
template <class F>
IntegralResult integrate(F&& f, double a, double b, double rel_tol = 1e-10,
                         double abs_tol = 0.0, int max_segments = 4000,
                         int initial_segments = 16) {
  if (!(a < b)) return {0.0, 0.0, a == b};
  std::priority_queue<detail::Segment> heap;
  double total = 0.0, total_err = 0.0;
  const int n0 = std::max(1, initial_segments);
  for (int i = 0; i < n0; ++i) {
    const double sa = a + (b - a) * i / n0;
    const double sb = a + (b - a) * (i + 1) / n0;
    auto seg = detail::gk15(f, sa, sb);
    total += seg.value;
    total_err += seg.error;
    heap.push(seg);
  }
  int segments = n0;
  while (segments < max_segments) {
    const double tol = std::max(rel_tol * std::abs(total), abs_tol);
    if (total_err <= tol) break;
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {  // interval exhausted
      heap.push(worst);
      break;
    }
    auto left = detail::gk15(f, worst.a, mid);
    auto right = detail::gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++segments;
  }
  const double tol = std::max(rel_tol * std::abs(total), abs_tol);
  return {total, total_err, total_err <= tol || total_err <= 1e-14 * std::abs(total) + 1e-300};
}

/// Integrates f on [a, inf) for integrands with eventually (super-)exponential
/// decay: pieces of doubling length are added until two consecutive pieces
/// are negligible against the accumulated value.
template <class F>
IntegralResult integrate_to_inf(F&& f, double a, double rel_tol = 1e-10,
                                double first_len = 1.0) {
  double total = 0.0, total_err = 0.0;
  double lo = a;
  double len = std::max(first_len, 1e-8);
  int quiet = 0;
  bool ok = true;
  for (int piece = 0; piece < 64; ++piece) {
    auto r = integrate(f, lo, lo + len, rel_tol * 0.1, 0.0, 2000, 8);
    ok = ok && r.converged;
    total += r.value;
    total_err += r.abs_error;
    if (std::abs(r.value) <= rel_tol * 1e-2 * std::abs(total) + 1e-300)
      ++quiet;
    else
      quiet = 0;
    if (quiet >= 2) break;
    lo += len;
    len *= 2.0;
  }
  const bool converged = ok && quiet >= 2 &&
      total_err <= std::max(rel_tol * 4.0 * std::abs(total), 1e-300);
  return {total, total_err, converged};
}

}  // namespace toppleone::quad
