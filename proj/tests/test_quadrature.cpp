#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "toppleone/quadrature.hpp"

using namespace toppleone;

TEST_CASE("polynomial and classic integrals") {
  auto r1 = quad::integrate([](double x) { return x * x; }, 0.0, 1.0);
  REQUIRE(r1.converged);
  CHECK_THAT(r1.value, Catch::Matchers::WithinRel(1.0 / 3.0, 1e-14));

  auto r2 = quad::integrate([](double x) { return std::sin(x); }, 0.0, M_PI);
  REQUIRE(r2.converged);
  CHECK_THAT(r2.value, Catch::Matchers::WithinRel(2.0, 1e-13));

  // 4/(1+x^2) on [0,1] = pi
  auto r3 = quad::integrate([](double x) { return 4.0 / (1.0 + x * x); }, 0.0, 1.0);
  CHECK_THAT(r3.value, Catch::Matchers::WithinRel(M_PI, 1e-13));
}

TEST_CASE("sharply peaked integrand is resolved") {
  // Gaussian bump of width 1e-3 at 0.7 inside [0,1]
  const double s = 1e-3;
  auto f = [s](double x) {
    const double d = (x - 0.7) / s;
    return std::exp(-0.5 * d * d);
  };
  auto r = quad::integrate(f, 0.0, 1.0, 1e-12);
  REQUIRE(r.converged);
  CHECK_THAT(r.value, Catch::Matchers::WithinRel(s * std::sqrt(2.0 * M_PI), 1e-11));
}

TEST_CASE("semi-infinite integrals with exponential decay") {
  auto r = quad::integrate_to_inf([](double t) { return std::exp(-t); }, 0.0);
  REQUIRE(r.converged);
  CHECK_THAT(r.value, Catch::Matchers::WithinRel(1.0, 1e-12));

  // gamma(5) = 24
  auto r2 = quad::integrate_to_inf(
      [](double t) { return t <= 0 ? 0.0 : std::exp(4.0 * std::log(t) - t); }, 0.0);
  REQUIRE(r2.converged);
  CHECK_THAT(r2.value, Catch::Matchers::WithinRel(24.0, 1e-11));

  // slow exponential: int_0^inf e^{-t/10} = 10
  auto r3 = quad::integrate_to_inf([](double t) { return std::exp(-0.1 * t); }, 0.0);
  CHECK_THAT(r3.value, Catch::Matchers::WithinRel(10.0, 1e-11));
}

TEST_CASE("degenerate interval") {
  auto r = quad::integrate([](double x) { return x; }, 2.0, 2.0);
  CHECK(r.value == 0.0);
}
