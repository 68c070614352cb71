#include <doctest.h>

#include <cmath>
#include <random>

#include "ihom/homogenize.hpp"
#include "ihom/quadrature.hpp"
#include "test_helpers.hpp"

using namespace ihom;
using ihom::testing::asymmetric_spec;
using ihom::testing::random_drift;
using ihom::testing::symmetric_spec;

namespace {

double bessel0(double x) { return std::cyl_bessel_i(0.0, x); }

double cell_residual(const Corrector& g) {
  double worst = 0.0;
  for (int i = 0; i < 1024; ++i) {
    const double u = i / 1024.0;
    const double b = g.drift()(u);
    worst = std::max(worst, std::abs(0.5 * g.second_derivative(u) + b * g.derivative(u) + b));
  }
  return worst;
}

}  // namespace

TEST_CASE("corrector of the zero drift") {
  const auto g = solve_corrector(PeriodicDrift{});
  CHECK(g.normalizer() == doctest::Approx(1.0).epsilon(1e-15));
  for (double u : {0.0, 0.3, 0.77}) {
    CHECK(std::abs(g.value(u)) < 1e-15);
    CHECK(std::abs(g.derivative(u)) < 1e-15);
  }
  CHECK(effective_coefficient_cell(g) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(effective_coefficient_product(PeriodicDrift{}) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("corrector of the sine drift") {
  const auto g = solve_corrector(PeriodicDrift::sine(1.0));
  const double c = std::exp(-2.0) / bessel0(2.0);
  CHECK(g.normalizer() == doctest::Approx(c).epsilon(1e-13));
  CHECK(1.0 + g.derivative(0.0) == doctest::Approx(c).epsilon(1e-13));
  CHECK(g.min_slope() > 0.0);
  CHECK(cell_residual(g) <= 1e-8);
  CHECK(std::abs(g.value(0.0) - g.value(1.0 - 1e-15)) < 1e-12);
  const auto mean = integrate(
      [&](double u) { return g.value(u) * std::exp(2.0 * g.drift().potential(u)); }, 0.0, 1.0);
  CHECK(std::abs(mean.value) < 1e-12);
}

TEST_CASE("effective coefficients against the Bessel oracle") {
  for (double beta : {1.0, 0.25, 0.5}) {
    const PeriodicDrift b = PeriodicDrift::sine(beta);
    const double exact = 1.0 / (bessel0(2.0 * beta) * bessel0(2.0 * beta));
    CHECK(effective_coefficient_product(b) == doctest::Approx(exact).epsilon(1e-12));
    CHECK(effective_coefficient_cell(solve_corrector(b)) == doctest::Approx(exact).epsilon(1e-12));
    CHECK(effective_coefficient_product(b) < 1.0);
    CHECK(std::abs(effective_coefficient_product(b) -
                   effective_coefficient_product(PeriodicDrift::sine(-beta))) < 1e-12);
  }
  CHECK(std::abs(effective_coefficient_product(PeriodicDrift::sine(1.0)) - 0.19243688) < 1e-8);
}

TEST_CASE("two routes agree on 100 random drifts") {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const auto b = random_drift(gen);
    const auto g = solve_corrector(b);
    const double cell = effective_coefficient_cell(g);
    const double product = effective_coefficient_product(b);
    CHECK(std::abs(cell - product) <= 1e-10 * product);
    CHECK(product < 1.0);
    CHECK(g.min_slope() > 0.0);
    CHECK(cell_residual(g) <= 1e-8);
  }
}

TEST_CASE("interface weights") {
  auto [zp, zm] = interface_weights(DriftSpec::zero_drift());
  CHECK(zp == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(zm == doctest::Approx(1.0).epsilon(1e-14));
  auto [lp, lm] = interface_weights(asymmetric_spec());
  CHECK(lm == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(lp == doctest::Approx(std::exp(-2.0) * bessel0(2.0)).epsilon(1e-13));
  CHECK(std::abs(lp - 0.3085083) < 1e-7);

  // constant interface drift shifts the weights by e^{2V(±η)}
  const double c = 1.5;
  const PeriodicDrift right({-1.0}, {c});
  const PeriodicDrift left({0.5, 0.3}, {c - 0.7, 0.7});
  const DriftSpec shifted(left, right, 0.5, InterfaceKind::polynomial, {c});
  auto [sp, sm] = interface_weights(shifted);
  auto z = [](const PeriodicDrift& b) {
    return integrate([&](double u) { return std::exp(2.0 * b.potential(u)); }, 0.0, 1.0).value;
  };
  CHECK(std::log(sp) == doctest::Approx(2.0 * c * 0.5 + std::log(z(right))).epsilon(1e-12));
  CHECK(std::log(sm) == doctest::Approx(-2.0 * c * 0.5 + std::log(z(left))).epsilon(1e-12));
}

TEST_CASE("homogenized parameters of the asymmetric example") {
  const auto hp = homogenized_params(asymmetric_spec());
  const double C2 = 1.0 / (bessel0(2.0) * bessel0(2.0));
  CHECK(hp.C_minus == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(hp.C_plus == doctest::Approx(std::sqrt(C2)).epsilon(1e-12));
  CHECK(hp.lambda_minus == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(hp.p == doctest::Approx(std::exp(-2.0) / (1.0 + std::exp(-2.0))).epsilon(1e-12));
  const double ratio = std::exp(-2.0) * bessel0(2.0) * C2;
  CHECK(hp.p_plus == doctest::Approx(ratio / (1.0 + ratio)).epsilon(1e-12));
  CHECK(std::abs(hp.p - 0.1192029) < 1e-7);
  CHECK(std::abs(hp.p_plus - 0.0560413) < 1e-7);
  CHECK(hp.c_plus == doctest::Approx(std::exp(-2.0) / bessel0(2.0)).epsilon(1e-13));
}

TEST_CASE("symmetric and mirrored specs") {
  const auto sym = homogenized_params(symmetric_spec());
  CHECK(sym.p == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(sym.p_plus == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(sym.p_minus == doctest::Approx(0.5).epsilon(1e-14));

  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 10; ++trial) {
    const DriftSpec spec(random_drift(gen), random_drift(gen), 0.5, InterfaceKind::blend);
    const auto a = homogenized_params(spec);
    const auto b = homogenized_params(spec.mirrored());
    CHECK(b.p == doctest::Approx(1.0 - a.p).epsilon(1e-10));
    CHECK(b.p_plus == doctest::Approx(a.p_minus).epsilon(1e-10));
  }
}

TEST_CASE("parameter identities on random specs") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 30; ++trial) {
    const DriftSpec spec(random_drift(gen), random_drift(gen), 0.5, InterfaceKind::blend);
    const auto h = homogenized_params(spec);
    CHECK(h.p > 0.0);
    CHECK(h.p < 1.0);
    CHECK(h.p_plus > 0.0);
    CHECK(h.p_plus < 1.0);
    CHECK(h.p_plus + h.p_minus == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(h.p + h.q == doctest::Approx(1.0).epsilon(1e-15));
    const double r1 = h.lambda_plus / h.lambda_minus;
    const double r2 = h.p * h.C_minus / (h.q * h.C_plus);
    CHECK(r1 == doctest::Approx(r2).epsilon(1e-12));
    const double e1 = h.p_plus / h.p_minus;
    CHECK(e1 == doctest::Approx(h.lambda_plus * h.C_plus * h.C_plus /
                                (h.lambda_minus * h.C_minus * h.C_minus))
                    .epsilon(1e-12));
    CHECK(e1 == doctest::Approx(h.C_plus * h.p / (h.C_minus * h.q)).epsilon(1e-12));
  }
}

TEST_CASE("compensator") {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 10; ++trial) {
    const DriftSpec spec(random_drift(gen), random_drift(gen), 0.5, InterfaceKind::blend);
    const Compensator g(spec);
    const double w = g.blend_halfwidth();
    for (double x : {w + 0.1, w + 1.37, w + 5.5}) {
      CHECK(g.value(x) == doctest::Approx(g.right().value(x - spec.eta())).epsilon(1e-14));
      CHECK(g.value(-x) == doctest::Approx(g.left().value(-x + spec.eta())).epsilon(1e-14));
    }
    // continuity of the blend
    for (double edge : {w, -w}) {
      CHECK(std::abs(g.value(edge - 1e-9) - g.value(edge + 1e-9)) < 1e-7);
      CHECK(std::abs(g.derivative(edge - 1e-9) - g.derivative(edge + 1e-9)) < 1e-6);
    }
    double min_slope = 1.0;
    double sup = 0.0;
    for (int i = 0; i <= 20000; ++i) {
      const double x = -w - 2.0 + (2.0 * w + 4.0) * i / 20000.0;
      min_slope = std::min(min_slope, 1.0 + g.derivative(x));
      sup = std::max(sup, std::abs(g.value(x)));
    }
    CHECK(min_slope > 0.0);
    CHECK(min_slope >= g.min_slope() - 1e-12);
    CHECK(sup <= g.sup_abs() * (1.0 + 1e-3) + 1e-12);
  }
}
