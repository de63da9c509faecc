#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "toppleone/analytic_moments.hpp"
#include "toppleone/estimators.hpp"
#include "toppleone/rng.hpp"

using namespace toppleone;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Direct quadrature of E[(estimator)^r] against the sampling density of
// alpha-hat: f_S(s) = n^n a^n e^{-n a / s} / (Gamma(n) s^{n+1}). Everything
// in log space; independent of the library's Bessel route.
double mle_moment_oracle(int r, int n, double a, double x, bool density) {
  const double gx = x * (2.0 - x);
  const double lg = std::log(gx);
  const double lpre = n * std::log(n * a) - std::lgamma(n);
  auto f = [=](double s) {
    if (s <= 0.0) return 0.0;
    double lcurve = r * s * lg;  // [g^s]^r
    if (density) lcurve += r * (std::log(s) + std::log(2.0 - 2.0 * x) + -lg);
    const double lw = lpre - n * a / s - (n + 1) * std::log(s);
    return std::exp(lcurve + lw);
  };
  return oracles::integrate_to_inf(f, 0.0, std::max(1.0, 2.0 * a), 1e-12);
}

// Direct quadrature of the UMVUE second moment over t, from the gamma law
// of the sufficient statistic.
double umvue_m2_oracle(int n, double a, double x, bool density) {
  const double gx = x * (2.0 - x);
  const double b = std::log(gx);
  const double A = (n - 1) * (2.0 - 2.0 * x) / gx;
  const int m = density ? 2 * n - 4 : 2 * n - 2;
  const double lpre =
      n * std::log(a) - std::lgamma(n) + (density ? 2.0 * std::log(A) : 0.0);
  auto f = [=](double t) {
    const double u = t + b;
    if (u <= 0.0 || t <= 0.0) return 0.0;
    return std::exp(lpre + m * std::log(u) - (n - 1.0) * std::log(t) - a * t);
  };
  return oracles::integrate_to_inf(f, -b, std::max(2.0, n / a), 1e-12);
}

}  // namespace

TEST_CASE("moment query validation") {
  CHECK_THROWS_AS(mle_pdf_moment({0, 5, 1.0, UnitPoint(0.5)}), std::domain_error);
  CHECK_THROWS_AS(mle_pdf_moment({1, 0, 1.0, UnitPoint(0.5)}), std::domain_error);
  CHECK_THROWS_AS(mle_cdf_moment({1, 5, -1.0, UnitPoint(0.5)}), std::domain_error);
}

TEST_CASE("MLE moment frozen values") {
  CHECK_THAT(mle_pdf_moment({1, 10, 1.0, UnitPoint(0.5)}),
             WithinRel(1.0429161423392543431, 1e-10));
  CHECK_THAT(mle_cdf_moment({1, 10, 1.0, UnitPoint(0.5)}),
             WithinRel(0.73079949780594708711, 1e-10));
  CHECK_THAT(mle_cdf_moment({1, 10, 2.0, UnitPoint(0.5)}),
             WithinRel(0.53989716395616329281, 1e-10));
}

TEST_CASE("MLE moments against the sampling-density quadrature oracle") {
  for (int n : {5, 10})
    for (double a : {0.5, 1.0, 2.0})
      for (double x : {0.25, 0.5, 0.75})
        for (int r : {1, 2}) {
          CHECK_THAT(mle_pdf_moment({r, n, a, UnitPoint(x)}),
                     WithinRel(mle_moment_oracle(r, n, a, x, true), 1e-7));
          CHECK_THAT(mle_cdf_moment({r, n, a, UnitPoint(x)}),
                     WithinRel(mle_moment_oracle(r, n, a, x, false), 1e-7));
        }
}

TEST_CASE("MLE MSE frozen values and oracle agreement") {
  CHECK_THAT(mle_pdf_mse(10, 1.0, UnitPoint(0.5)),
             WithinRel(0.051819264457947239, 1e-9));
  CHECK_THAT(mle_cdf_mse(10, 1.0, UnitPoint(0.5)),
             WithinRel(0.0061979172472426621, 1e-9));
  CHECK_THAT(mle_pdf_mse(50, 2.0, UnitPoint(0.5)),
             WithinRel(0.0075042603604586537, 1e-9));
  CHECK_THAT(mle_cdf_mse(50, 2.0, UnitPoint(0.5)),
             WithinRel(0.0021577674236177526, 1e-9));

  for (int n : {5, 10})
    for (double a : {0.5, 1.0, 2.0})
      for (double x : {0.25, 0.5, 0.75}) {
        const double gx = x * (2.0 - x);
        const double fx = a * (2.0 - 2.0 * x) * std::pow(gx, a - 1.0);
        const double Fx = std::pow(gx, a);
        const double mse_f_oracle = mle_moment_oracle(2, n, a, x, true) -
                                    2.0 * fx * mle_moment_oracle(1, n, a, x, true) +
                                    fx * fx;
        const double mse_F_oracle = mle_moment_oracle(2, n, a, x, false) -
                                    2.0 * Fx * mle_moment_oracle(1, n, a, x, false) +
                                    Fx * Fx;
        CHECK_THAT(mle_pdf_mse(n, a, UnitPoint(x)), WithinRel(mse_f_oracle, 1e-7));
        CHECK_THAT(mle_cdf_mse(n, a, UnitPoint(x)), WithinRel(mse_F_oracle, 1e-7));
      }
}

TEST_CASE("MSE dominates squared bias and decreases with n") {
  for (double a : {1.0, 2.0}) {
    const UnitPoint x(0.5);
    const double fx = pdf(ShapeParam(a), x);
    const double Fx = cdf(ShapeParam(a), x);
    double prev_f = 1e300, prev_F = 1e300;
    for (int n : {5, 10, 25, 50, 100}) {
      const double mf = mle_pdf_mse(n, a, x);
      const double mF = mle_cdf_mse(n, a, x);
      const double bias_f = mle_pdf_moment({1, n, a, x}) - fx;
      const double bias_F = mle_cdf_moment({1, n, a, x}) - Fx;
      CHECK(mf >= bias_f * bias_f - 1e-12);
      CHECK(mF >= bias_F * bias_F - 1e-12);
      CHECK(mf >= -1e-12);
      CHECK(mF >= -1e-12);
      CHECK(mf < prev_f);
      CHECK(mF < prev_F);
      prev_f = mf;
      prev_F = mF;
    }
    CHECK(prev_f < 0.01);
  }
}

TEST_CASE("MLE pdf-moment mean tends to f(x) for large n") {
  const double got = mle_pdf_moment({1, 200, 2.0, UnitPoint(0.5)});
  CHECK_THAT(got, WithinRel(1.5000820296733933, 1e-9));
  CHECK_THAT(got, WithinRel(1.5, 0.01));
}

TEST_CASE("CDF moment approaches 1 as x -> 1") {
  CHECK_THAT(mle_cdf_moment({1, 10, 1.0, UnitPoint(1.0 - 1e-7)}),
             WithinAbs(1.0, 1e-4));
  // once 2x-x^2 rounds to 1 the Bessel argument vanishes and the closed form
  // diverges; that is reported as overflow
  CHECK_THROWS_AS(mle_cdf_moment({1, 10, 1.0, UnitPoint(1.0 - 1e-9)}),
                  std::overflow_error);
  CHECK_THROWS_AS(mle_pdf_moment({1, 10, 1.0, UnitPoint(1.0 - 1e-9)}),
                  std::overflow_error);
}

TEST_CASE("moment overflow is signalled for extreme arguments") {
  CHECK_THROWS_AS(mle_pdf_moment({2, 5, 0.5, UnitPoint(1e-300)}),
                  std::overflow_error);
}

TEST_CASE("MLE r=1 moments match Monte Carlo means") {
  const int n = 10;
  const ShapeParam truth(1.0);
  const UnitPoint x(0.5);
  const int reps = 1000000;
  std::vector<double> fvals, Fvals;
  fvals.reserve(reps);
  Fvals.reserve(reps);
  for (int r = 0; r < reps; ++r) {
    auto rng = Xoshiro256pp::for_stream(555, r);
    auto u = [&rng] { return open_unit(rng); };
    const Sample s(sample(truth, u, n));
    const FittedCurve c = mle(s);
    fvals.push_back(curve_pdf(c, x));
    Fvals.push_back(curve_cdf(c, x));
  }
  const auto mf = oracles::mean_var(fvals);
  const auto mF = oracles::mean_var(Fvals);
  CHECK(std::abs(mf.mean - mle_pdf_moment({1, n, 1.0, x})) <= 3.0 * mf.se_mean);
  CHECK(std::abs(mF.mean - mle_cdf_moment({1, n, 1.0, x})) <= 3.0 * mF.se_mean);
}

TEST_CASE("UMVUE MSE frozen values") {
  const auto pm = umvue_pdf_mse(5, 1.0, UnitPoint(0.5));
  CHECK_THAT(pm.second_moment, WithinRel(1.1195992061814303, 1e-9));
  CHECK_THAT(pm.mse, WithinRel(0.1195992061814303, 1e-8));
  const auto cm = umvue_cdf_mse(5, 1.0, UnitPoint(0.5));
  CHECK_THAT(cm.mse, WithinRel(0.012689022884081221, 1e-8));
}

TEST_CASE("UMVUE second moment against the t-integral oracle") {
  for (int n : {5, 10})
    for (double a : {0.5, 1.0, 2.0})
      for (double x : {0.25, 0.5, 0.75}) {
        CHECK_THAT(umvue_pdf_mse(n, a, UnitPoint(x)).second_moment,
                   WithinRel(umvue_m2_oracle(n, a, x, true), 1e-7));
        CHECK_THAT(umvue_cdf_mse(n, a, UnitPoint(x)).second_moment,
                   WithinRel(umvue_m2_oracle(n, a, x, false), 1e-7));
      }
}

TEST_CASE("UMVUE series and quadrature second moments agree") {
  for (int n : {5, 10, 15})
    for (double a : {0.5, 1.0, 2.0})
      for (double x : {0.25, 0.5, 0.75}) {
        const auto pm = umvue_pdf_mse(n, a, UnitPoint(x));
        REQUIRE(pm.series_second_moment.has_value());
        CHECK(pm.series_clean);
        CHECK(pm.series_consistent);
        CHECK_THAT(*pm.series_second_moment,
                   WithinRel(pm.second_moment, 1e-8));
        const auto cm = umvue_cdf_mse(n, a, UnitPoint(x));
        REQUIRE(cm.series_second_moment.has_value());
        CHECK(cm.series_clean);
        CHECK(cm.series_consistent);
        CHECK_THAT(*cm.series_second_moment,
                   WithinRel(cm.second_moment, 1e-8));
      }
}

TEST_CASE("UMVUE MSE edge behaviour") {
  CHECK_THROWS_AS(umvue_pdf_mse(2, 1.0, UnitPoint(0.5)), std::domain_error);
  CHECK_THROWS_AS(umvue_cdf_mse(5, 0.0, UnitPoint(0.5)), std::domain_error);

  // series evaluation is skipped above the cancellation-safe size
  const auto big = umvue_pdf_mse(40, 1.0, UnitPoint(0.5));
  CHECK_FALSE(big.series_second_moment.has_value());
  CHECK(big.mse >= -1e-12);

  double prev_f = 1e300, prev_F = 1e300;
  for (int n : {5, 10, 25, 50, 100}) {
    const auto mf = umvue_pdf_mse(n, 2.0, UnitPoint(0.5));
    const auto mF = umvue_cdf_mse(n, 2.0, UnitPoint(0.5));
    CHECK(mf.mse >= -1e-12);
    CHECK(mF.mse >= -1e-12);
    CHECK(mf.mse < prev_f);
    CHECK(mF.mse < prev_F);
    prev_f = mf.mse;
    prev_F = mF.mse;
  }
  CHECK(prev_f < 0.01);
  CHECK(prev_F < 0.005);
}

TEST_CASE("UMVUE analytic MSE equals Monte Carlo variance") {
  // unbiasedness makes MSE and variance coincide
  const int n = 10;
  const double a = 2.0;
  const UnitPoint x(0.5);
  const int reps = 100000;
  std::vector<double> fvals;
  fvals.reserve(reps);
  for (int r = 0; r < reps; ++r) {
    auto rng = Xoshiro256pp::for_stream(31337, r);
    auto u = [&rng] { return open_unit(rng); };
    const Sample s(sample(ShapeParam(a), u, n));
    fvals.push_back(curve_pdf(umvue(s), x));
  }
  // se of the variance estimate from the spread of squared deviations
  const auto mv = oracles::mean_var(fvals);
  std::vector<double> sq;
  sq.reserve(reps);
  for (double v : fvals) sq.push_back((v - mv.mean) * (v - mv.mean));
  const auto sq_stats = oracles::mean_var(sq);
  const double analytic = umvue_pdf_mse(n, a, x).mse;
  CHECK(std::abs(mv.var - analytic) <= 3.0 * sq_stats.se_mean);
}
