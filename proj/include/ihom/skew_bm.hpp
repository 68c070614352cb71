#pragma once

// Skew Brownian motion B_p and the rescaled limit process B_{C±,p} = G(B_p),
// where G(x) = C₊x for x ≥ 0 and C₋x otherwise.
//
// Transition density of B_p (unit scale):
//   q_t(x, y) = φ_t(y - x) + sgn(y)(2p - 1) φ_t(|x| + |y|).

#include <functional>
#include <span>
#include <vector>

#include "ihom/homogenize.hpp"
#include "ihom/rng.hpp"

namespace ihom {

struct SkewParams {
  double p = 0.5;
  double C_plus = 1.0;
  double C_minus = 1.0;

  /// Throws DomainError unless 0 < p < 1 and C± > 0.
  void validate() const;
};

SkewParams skew_params(const HomogenizedParams& hp);

double g_map(const SkewParams& params, double x);
double g_inverse(const SkewParams& params, double y);

/// Density of B_p(t) at y given B_p(0) = x. Throws DomainError if t ≤ 0.
double skew_transition_density(const SkewParams& params, double t, double x, double y);
/// P(B_p(t) ≤ y | B_p(0) = x).
double skew_transition_cdf(const SkewParams& params, double t, double x, double y);

/// Density and CDF of G(B_p(t)) in the original coordinates, started at x.
double limit_transition_density(const SkewParams& params, double t, double x, double y);
double limit_transition_cdf(const SkewParams& params, double t, double x, double y);

/// Fixed horizon view of the transition kernel.
struct SkewDensity {
  SkewParams params;
  double t;
  double operator()(double x, double y) const {
    return skew_transition_density(params, t, x, y);
  }
  double cdf(double x, double y) const { return skew_transition_cdf(params, t, x, y); }
};

/// Largest errors of the transition density over a fixed set of (t, x, y):
/// total mass, Chapman–Kolmogorov, the flux condition
/// p ∂ₓq(0⁺, y) = (1 - p) ∂ₓq(0⁻, y) and the forward jump
/// q(x, 0⁺)/p = q(x, 0⁻)/(1 - p) (derivatives by one-sided differences).
struct DensityGate {
  double normalization = 0.0;
  double chapman_kolmogorov = 0.0;
  double flux = 0.0;
  double jump = 0.0;

  bool passed() const {
    return normalization <= 1e-10 && chapman_kolmogorov <= 1e-6 && flux <= 1e-6 && jump <= 1e-6;
  }
};

DensityGate skew_density_gate(const SkewParams& params);

/// Draws B_p(t) given B_p(0) = x by inverting the transition CDF with a
/// safeguarded Newton iteration (|CDF(y) - u| ≤ 1e-12).
double sample_skew_increment(const SkewParams& params, double t, double x, RandomStream& rng);

struct PathSample {
  std::vector<double> times;
  std::vector<double> values;
};

/// Path of B_{C±,p} on an increasing time grid starting at `x0` (in original
/// coordinates) at time grid[0].
PathSample sample_limit_path(const SkewParams& params, std::span<const double> grid, double x0,
                             RandomStream& rng);

/// A function that is C² away from the origin, given by its value and second
/// derivative on each side.
struct PiecewiseFunction {
  std::function<double(double)> value;
  std::function<double(double)> second_derivative;
};

struct DomainCheck {
  double residual = 0.0;
  double std_error = 0.0;
  std::size_t paths = 0;
};

struct DomainCheckOptions {
  double horizon = 1.0;
  int steps = 200;
  double x0 = 0.0;
  std::size_t paths = 10000;
  std::uint64_t seed = 1;
};

/// Monte Carlo estimate of E[f(X_t) - f(X_0) - ∫₀ᵗ Af(X_s) ds] over paths of
/// X = B_{C±,p}, with Af = ½C±² f'' on either side and the time integral by
/// the trapezoidal rule on the sampling grid. Zero iff f is in the generator
/// domain, i.e. p C₊ f'(0⁺) = (1 - p) C₋ f'(0⁻).
DomainCheck check_domain_condition(const SkewParams& params, const PiecewiseFunction& f,
                                   const DomainCheckOptions& opt = {});

}  // namespace ihom
