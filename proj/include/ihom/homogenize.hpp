#pragma once

// Limit description of the interface diffusion: cell correctors, effective
// diffusion coefficients C±, interface weights λ±, skewness p and the exit
// weights p±.

#include <utility>
#include <vector>

#include "ihom/drift_model.hpp"

namespace ihom {

enum class Side { left, right };

/// Periodic solution of ½g'' + b g' = -b with ∫₀¹ g dμ = 0, where
/// μ(du) = e^{2V(u)} du / Z. In one dimension 1 + g' = c·e^{-2V} with
/// c = 1/∫₀¹ e^{-2V}; g itself is tabulated on `grid` cells per period and
/// refined with a Gauss panel inside the cell.
class Corrector {
 public:
  Corrector(PeriodicDrift drift, Side side, int grid = 1024);

  double value(double u) const;
  double derivative(double u) const;
  double second_derivative(double u) const;

  Side side() const { return side_; }
  const PeriodicDrift& drift() const { return drift_; }
  /// c = 1/∫₀¹ e^{-2V}.
  double normalizer() const { return normalizer_; }
  /// Z = ∫₀¹ e^{2V}.
  double partition() const { return partition_; }
  double offset() const { return offset_; }
  int grid_size() const { return grid_; }
  double sup_abs() const { return sup_abs_; }
  /// min over one period of 1 + g' (grid scan refined by Brent's method).
  double min_slope() const { return min_slope_; }

 private:
  double primitive(double u) const;  // ∫₀ᵘ e^{-2V}, u ∈ [0, 1]

  PeriodicDrift drift_;
  Side side_;
  int grid_;
  bool zero_;  // b ≡ 0 gives g ≡ 0 exactly
  std::vector<double> cumulative_;
  double normalizer_ = 1.0;
  double partition_ = 1.0;
  double offset_ = 0.0;
  double sup_abs_ = 0.0;
  double min_slope_ = 1.0;
};

Corrector solve_corrector(const PeriodicDrift& drift, Side side = Side::right);

/// C² = ∫₀¹ (1 + g')² dμ.
double effective_coefficient_cell(const Corrector& corr);

/// C² = [∫₀¹ e^{-2V} · ∫₀¹ e^{2V}]^{-1}.
double effective_coefficient_product(const PeriodicDrift& drift);

/// (λ₊, λ₋) = (∫_η^{η+1} e^{2V}, ∫_{-η-1}^{-η} e^{2V}) with the full potential.
std::pair<double, double> interface_weights(const DriftSpec& spec);

struct HomogenizedParams {
  double C_plus = 1.0;
  double C_minus = 1.0;
  double lambda_plus = 1.0;
  double lambda_minus = 1.0;
  double p = 0.5;
  /// 1 - p without cancellation.
  double q = 0.5;
  double p_plus = 0.5;
  double p_minus = 0.5;
  /// Corrector normalizers c± = 1/∫₀¹ e^{-2V±}.
  double c_plus = 1.0;
  double c_minus = 1.0;
};

/// Throws CoefficientMismatch when the cell and product routes for C² differ
/// by more than 1e-8 relative.
HomogenizedParams homogenized_params(const DriftSpec& spec);

/// Global compensator: g₋(x + η) left of the interface, g₊(x - η) right of
/// it, and a quintic across [-w, w] (w ≥ η the blend half-width) matching
/// value, slope and curvature at both ends.
class Compensator {
 public:
  explicit Compensator(const DriftSpec& spec);

  double value(double x) const;
  double derivative(double x) const;

  const DriftSpec& spec() const { return spec_; }
  const Corrector& left() const { return left_; }
  const Corrector& right() const { return right_; }
  double blend_halfwidth() const { return halfwidth_; }
  double sup_abs() const { return sup_abs_; }
  /// min over ℝ of 1 + g', i.e. the φ in g' ≥ φ - 1.
  double min_slope() const { return min_slope_; }

 private:
  double outer_value(double x) const;
  double outer_derivative(double x) const;
  double outer_second(double x) const;
  void build_blend();

  DriftSpec spec_;
  Corrector left_;
  Corrector right_;
  double halfwidth_;
  std::vector<double> blend_;
  double sup_abs_ = 0.0;
  double min_slope_ = 1.0;
};

}  // namespace ihom
