#pragma once

// Quadrature and closed-form checks: scale-function exit probabilities and
// the discounted occupation of a shrinking interval for the worst-case
// interface process.

#include <array>
#include <cstdint>
#include <vector>

#include "ihom/drift_model.hpp"

namespace ihom {

/// s(x) = ∫₀ˣ e^{-2V(y/ε)} dy, whole periods taken from a cached block.
class ScaleFunction {
 public:
  ScaleFunction(const DriftSpec& spec, double eps);

  double operator()(double x) const { return eps_ * integral_(x / eps_); }
  double eps() const { return eps_; }
  const DriftSpec& spec() const { return integral_.spec(); }

 private:
  double eps_;
  ExpPotentialIntegral integral_;
};

double scale(const DriftSpec& spec, double eps, double x);

/// P_x(T_b < T_a). Throws DomainError unless a < x < b.
double exit_probability(const DriftSpec& spec, double eps, double x, double a, double b);

struct ExitRateFit {
  std::vector<double> eps;
  std::vector<double> delta;
  std::vector<double> probability;
  double target = 0.0;  // p₊ from the homogenized parameters
  double alpha = 0.0;
  double limit = 0.0;
  /// Every probability equals the target to rounding; no fit is made.
  bool exact = false;
};

/// Exit probabilities through ±√ε from x = x_scaled·ε, the log-log exponent
/// of |P_ε - p₊| and the extrapolated limit L of P_ε ≈ L + K ε^α.
ExitRateFit exit_rate_fit(const DriftSpec& spec, double x_scaled, std::vector<double> eps_grid);

/// Solution of λf - ½f'' - b_V f' = 1_{(-δ,δ)} with b_V = -sgn(x)/ε on
/// 0 < |x| ≤ ε and zero elsewhere. For x ≥ 0:
///   f = B₀ e^{-rx}                         x ≥ δ
///   f = 1/λ + A₁ e^{rx} + B₁ e^{-rx}       ε ≤ x ≤ δ
///   f = 1/λ + ε²A₂ e^{γ₁x} + B₂ e^{-γ₂x}    0 ≤ x ≤ ε
/// with r = √(2λ), and f(-x) = f(x).
class ResolventSolution {
 public:
  ResolventSolution(double eps, double delta, double lambda);

  double eps() const { return eps_; }
  double delta() const { return delta_; }
  double lambda() const { return lambda_; }
  double gamma1() const { return gamma1_; }
  double gamma2() const { return gamma2_; }
  /// (B₀, A₁, B₁, A₂, B₂).
  const std::array<double, 5>& coefficients() const { return coef_; }
  double sup_norm() const { return sup_; }
  double condition_number() const { return cond_; }
  /// Largest |λf - ½f'' - b_V f' - 1_{(-δ,δ)}| over the collocation points.
  double ode_residual() const { return ode_residual_; }
  /// Largest relative value/derivative jump across x = ε and x = δ.
  double matching_residual() const { return matching_residual_; }

  double operator()(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;

 private:
  enum class Piece { inner, middle, outer };
  Piece piece(double x) const;
  double eval(double x, int order, Piece piece) const;

  double eps_, delta_, lambda_, r_, gamma1_, gamma2_;
  // scaled unknowns: B₀e^{-rδ}, A₁e^{rδ}, B₁e^{-rε}, ε²A₂, B₂
  std::array<double, 5> scaled_{};
  std::array<double, 5> coef_{};
  double sup_ = 0.0;
  double cond_ = 0.0;
  double ode_residual_ = 0.0;
  double matching_residual_ = 0.0;
};

/// Throws SingularSystem if the equilibrated matching matrix has condition
/// number above 1e12, DomainError unless 0 < ε < δ and λ > 0.
ResolventSolution resolvent_solve(double eps, double delta, double lambda);

/// -(1/(2λ))(0, 1, 1, λ, 2).
std::array<double, 5> resolvent_lowest_order(double lambda);

struct ResolventMC {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t steps = 0;
};

/// Euler–Maruyama estimate of E_x ∫₀^T e^{-λt} 1_{(-δ,δ)}(V_t) dt with
/// e^{-λT} = 1e-6. Steps shrink as (d/4)² near the points 0, ±ε, ±δ, down to ε²/64.
ResolventMC resolvent_mc_crosscheck(double eps, double delta, double lambda, std::size_t paths,
                                    std::uint64_t seed, double x0 = 0.0, unsigned workers = 1);

}  // namespace ihom
