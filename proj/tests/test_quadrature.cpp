#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ihom/errors.hpp"
#include "ihom/quadrature.hpp"

using namespace ihom;

TEST_CASE("gauss-legendre rule") {
  const auto& x = GaussLegendre10::nodes();
  const auto& w = GaussLegendre10::weights();
  double total = 0.0;
  for (double wi : w) total += wi;
  CHECK(total == doctest::Approx(2.0).epsilon(1e-15));
  // exact for degree 19
  for (int deg = 0; deg <= 19; ++deg) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], deg);
    const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
    CHECK(std::abs(s - exact) < 1e-14);
  }
}

TEST_CASE("adaptive integration of smooth functions") {
  auto r = integrate([](double x) { return std::exp(x); }, 0.0, 1.0);
  CHECK(std::abs(r.value - (std::numbers::e - 1.0)) < 1e-14);
  r = integrate([](double x) { return std::exp(2.0 * std::cos(2 * std::numbers::pi * x)); }, 0.0,
                1.0);
  CHECK(std::abs(r.value - std::cyl_bessel_i(0.0, 2.0)) < 1e-13);
  // cancelling integrand
  r = integrate([](double x) { return std::sin(2 * std::numbers::pi * x); }, 0.0, 1.0);
  CHECK(std::abs(r.value) < 1e-15);
  CHECK(integrate([](double) { return 1.0; }, 2.0, 2.0).value == 0.0);
}

TEST_CASE("non-smooth integrand exhausts the level cap") {
  auto step = [](double x) { return x < 1.0 / 3.0 ? 0.0 : 1.0; };
  CHECK_THROWS_AS(integrate(step, 0.0, 1.0), QuadratureFailure);
  QuadratureOptions loose;
  loose.rel_tol = 1e-3;
  CHECK(integrate(step, 0.0, 1.0, loose).value == doctest::Approx(2.0 / 3.0).epsilon(1e-3));
}
