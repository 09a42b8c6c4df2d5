#include <doctest.h>

#include <cmath>

#include "picrustkit/core/errors.hpp"
#include "picrustkit/stats/special_functions.hpp"

using namespace picrustkit;

// Reference values computed independently with 30-digit arithmetic
// (regularized incomplete beta/gamma definitions), frozen here.

TEST_CASE("normal survival function") {
  CHECK(stats::normal_sf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(stats::normal_sf(1.959963984540054) == doctest::Approx(0.025).epsilon(1e-12));
  CHECK(std::fabs(stats::normal_sf(-3.0) - 0.99865010196836990547) < 1e-14);
  CHECK(stats::normal_sf(-40.0) > 1.0 - 1e-10);
}

TEST_CASE("student t survival function") {
  // Cauchy analytic: 1/2 - arctan(1)/pi
  CHECK(std::fabs(stats::student_t_sf(1.0, 1.0) - 0.25) < 1e-12);
  CHECK(std::fabs(stats::student_t_sf(0.5, 1.0) - 0.35241638234956672582) < 1e-12);
  CHECK(std::fabs(stats::student_t_sf(2.5, 7.0) - 0.020496109292876448445) < 1e-12);
  CHECK(std::fabs(stats::student_t_sf(-1.3, 4.7) - 0.8731513520676949107) < 1e-12);
  CHECK(stats::student_t_sf(35.0, 1000.0) == doctest::Approx(3.6731418018743466e-176).epsilon(1e-6));
  CHECK(stats::student_t_sf(0.0, 12.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(stats::student_t_sf(-40.0, 5.0) > 1.0 - 1e-10);
  CHECK_THROWS_AS(stats::student_t_sf(1.0, 0.0), validation_error);
}

TEST_CASE("chi-squared survival function") {
  // analytic: survival at df=2 is exp(-x/2)
  CHECK(std::fabs(stats::chi_squared_sf(2.0, 2.0) - std::exp(-1.0)) < 1e-12);
  CHECK(std::fabs(stats::chi_squared_sf(3.2, 5.0) - 0.66918290203324321435) < 1e-12);
  CHECK(std::fabs(stats::chi_squared_sf(40.0, 17.5) - 0.001649585075015331334) < 1e-12);
  CHECK(std::fabs(stats::chi_squared_sf(1e-3, 0.5) - 0.83504024923158716395) < 1e-12);
  CHECK(stats::chi_squared_sf(-1.0, 3.0) == 1.0);
  CHECK_THROWS_AS(stats::chi_squared_sf(1.0, -2.0), validation_error);
}

TEST_CASE("F survival function") {
  CHECK(std::fabs(stats::f_sf(2.75, 3.0, 16.0) - 0.076878430461094509339) < 1e-12);
  CHECK(std::fabs(stats::f_sf(0.4, 10.0, 2.0) - 0.86831275720164609053) < 1e-12);
  CHECK(std::fabs(stats::f_sf(9.1, 1.0, 1.0) - 0.2037799134763460254) < 1e-12);
  CHECK(stats::f_sf(0.0, 2.0, 2.0) == 1.0);
  CHECK_THROWS_AS(stats::f_sf(1.0, 0.0, 1.0), validation_error);
}

TEST_CASE("survival functions are monotone non-increasing") {
  double prev_n = 2.0, prev_t = 2.0, prev_c = 2.0, prev_f = 2.0;
  for (double x = -40.0; x <= 40.0; x += 0.25) {
    const double n = stats::normal_sf(x);
    const double t = stats::student_t_sf(x, 6.5);
    CHECK(n <= prev_n + 1e-15);
    CHECK(t <= prev_t + 1e-15);
    prev_n = n;
    prev_t = t;
    if (x > 0) {
      const double c = stats::chi_squared_sf(x, 4.0);
      const double f = stats::f_sf(x, 5.0, 9.0);
      CHECK(c <= prev_c + 1e-15);
      CHECK(f <= prev_f + 1e-15);
      prev_c = c;
      prev_f = f;
    }
  }
}

TEST_CASE("t distribution consistency with F at matched degrees of freedom") {
  // P(|T_v| > x) equals P(F_{1,v} > x^2)
  for (double x : {0.3, 1.0, 2.2, 5.0}) {
    for (double v : {1.0, 4.0, 30.0, 1000.0}) {
      const double two_sided_t = 2.0 * stats::student_t_sf(x, v);
      const double f_tail = stats::f_sf(x * x, 1.0, v);
      CHECK(std::fabs(two_sided_t - f_tail) < 1e-12);
    }
  }
}
