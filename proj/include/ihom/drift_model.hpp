#pragma once

// The drift b of the microscopic diffusion dX = b(X) dt + dB: a period-1
// field b₋ left of the interface [-η, η], another one b₊ right of it, and an
// interface piece joining them continuously.

#include <span>
#include <string>
#include <vector>

namespace ihom {

/// Finite Fourier series b(u) = Σ_k a_k sin(2πku) + c_k cos(2πku), k ≥ 1.
/// The constant mode is absent, so the field is centred.
class PeriodicDrift {
 public:
  PeriodicDrift() = default;
  PeriodicDrift(std::vector<double> sin_coeffs, std::vector<double> cos_coeffs);

  /// b(u) = -2πβ sin(2πu), whose potential is β(cos 2πu - 1).
  static PeriodicDrift sine(double beta);

  double operator()(double u) const;
  double derivative(double u) const;
  double second_derivative(double u) const;
  /// V(u) = ∫₀ᵘ b; periodic because b is centred.
  double potential(double u) const;

  std::span<const double> sin_coeffs() const { return sin_; }
  std::span<const double> cos_coeffs() const { return cos_; }
  int modes() const { return static_cast<int>(sin_.size()); }
  bool is_zero() const;
  /// max |b| sampled on a fine grid of one period.
  double sup_norm() const;
  PeriodicDrift negated() const;

  bool operator==(const PeriodicDrift&) const = default;

 private:
  std::vector<double> sin_;
  std::vector<double> cos_;
};

enum class InterfaceKind { zero, blend, polynomial };

std::string to_string(InterfaceKind kind);

class DriftSpec {
 public:
  /// `poly` holds the coefficients of b(x) = Σ_j poly[j] x^j on [-η, η] and
  /// is only used for InterfaceKind::polynomial. Throws ConfigError when b is
  /// not continuous at ±η.
  DriftSpec(PeriodicDrift left, PeriodicDrift right, double eta = 0.5,
            InterfaceKind kind = InterfaceKind::zero, std::vector<double> poly = {});

  static DriftSpec zero_drift(double eta = 0.5);

  double drift(double x) const;
  double potential(double x) const;

  const PeriodicDrift& left() const { return left_; }
  const PeriodicDrift& right() const { return right_; }
  double eta() const { return eta_; }
  InterfaceKind interface_kind() const { return kind_; }
  /// Interface polynomial in the scaled variable s = x/η.
  std::span<const double> interface_coeffs() const { return iface_; }
  double potential_at_right_edge() const { return v_right_; }
  double potential_at_left_edge() const { return v_left_; }
  /// max |b| over both periodic parts and the interface (grid sampled).
  double sup_norm() const { return sup_norm_; }
  /// Mirror image x ↦ -x: the drift becomes -b(-x).
  DriftSpec mirrored() const;

  bool operator==(const DriftSpec& other) const;

 private:
  double interface_drift(double x) const;
  double interface_potential(double x) const;

  PeriodicDrift left_;
  PeriodicDrift right_;
  double eta_;
  InterfaceKind kind_;
  std::vector<double> iface_;
  double v_right_ = 0.0;
  double v_left_ = 0.0;
  double sup_norm_ = 0.0;
};

double eval_drift(const DriftSpec& spec, double x);
double eval_potential(const DriftSpec& spec, double x);
/// F₁(u) = exp(-2V(u)).
double integrating_factor(const DriftSpec& spec, double u);

/// J(z) = ∫₀ᶻ exp(2·sign·V(u)) du with whole periods outside the interface
/// taken from cached one-period integrals. sign = -1 gives the scale
/// function density F₁, sign = +1 the invariant density.
class ExpPotentialIntegral {
 public:
  ExpPotentialIntegral(const DriftSpec& spec, int sign);

  double operator()(double z) const;
  double integrand(double u) const;
  /// ∫ over one period right of η, resp. left of -η.
  double right_period() const { return right_period_; }
  double left_period() const { return left_period_; }
  const DriftSpec& spec() const { return spec_; }

 private:
  double partial_right(double frac) const;
  double partial_left(double frac) const;

  DriftSpec spec_;
  int sign_;
  double at_right_edge_ = 0.0;
  double at_left_edge_ = 0.0;
  double right_period_ = 0.0;
  double left_period_ = 0.0;
};

namespace detail {

/// Quintic Σ c_j s^j on [-1, 1] with prescribed value, first and second
/// derivative (with respect to s) at s = -1 and s = +1.
std::vector<double> hermite_quintic(double v0, double d0, double dd0, double v1, double d1,
                                    double dd1);

}  // namespace detail

}  // namespace ihom
