#pragma once

// Composite Gauss–Legendre quadrature with panel doubling.
//
// The panel count is 2^k; k grows until two successive estimates agree to the
// relative tolerance (measured against the integral of |f| so that integrands
// with cancelling mass converge too). Exceeding the level cap is an error.

#include <array>
#include <algorithm>
#include <cmath>
#include <string>

#include "ihom/errors.hpp"

namespace ihom {

struct QuadratureOptions {
  double rel_tol = 1e-12;
  int max_level = 16;
  /// Accepted regardless of rel_tol; for integrands that vanish to rounding.
  double abs_tol = 0.0;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int level = 0;
};

/// Ten-point Gauss–Legendre rule on [-1, 1].
struct GaussLegendre10 {
  static constexpr int order = 10;
  static const std::array<double, order>& nodes();
  static const std::array<double, order>& weights();
};

/// One Gauss–Legendre panel on [a, b].
template <class F>
double gauss_panel(const F& f, double a, double b) {
  const auto& x = GaussLegendre10::nodes();
  const auto& w = GaussLegendre10::weights();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (int i = 0; i < GaussLegendre10::order; ++i) sum += w[i] * f(mid + half * x[i]);
  return half * sum;
}

namespace detail {

template <class F>
void composite(const F& f, double a, double b, int panels, double& value, double& abs_value) {
  const auto& x = GaussLegendre10::nodes();
  const auto& w = GaussLegendre10::weights();
  const double width = (b - a) / panels;
  const double half = 0.5 * width;
  value = 0.0;
  abs_value = 0.0;
  double c = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    double panel = 0.0;
    double panel_abs = 0.0;
    for (int i = 0; i < GaussLegendre10::order; ++i) {
      const double v = f(mid + half * x[i]);
      panel += w[i] * v;
      panel_abs += w[i] * std::abs(v);
    }
    // Neumaier summation across panels
    const double term = half * panel;
    const double t = value + term;
    c += std::abs(value) >= std::abs(term) ? (value - t) + term : (term - t) + value;
    value = t;
    abs_value += half * panel_abs;
  }
  value += c;
}

}  // namespace detail

template <class F>
QuadratureResult integrate(const F& f, double a, double b, QuadratureOptions opt = {}) {
  if (a == b) return {};
  double prev = 0.0;
  double prev_abs = 0.0;
  detail::composite(f, a, b, 1, prev, prev_abs);
  (void)prev_abs;
  for (int level = 1; level <= opt.max_level; ++level) {
    double value = 0.0;
    double abs_value = 0.0;
    detail::composite(f, a, b, 1 << level, value, abs_value);
    const double err = std::abs(value - prev);
    if (err <= std::max(opt.rel_tol * abs_value, opt.abs_tol) || abs_value == 0.0) {
      return {value, err, level};
    }
    prev = value;
  }
  throw QuadratureFailure("quadrature did not converge on [" + std::to_string(a) + ", " +
                          std::to_string(b) + "]");
}

}  // namespace ihom
