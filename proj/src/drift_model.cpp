#include "ihom/drift_model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "ihom/errors.hpp"
#include "ihom/quadrature.hpp"

namespace ihom {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kContinuityTol = 1e-10;

double frac(double u) { return u - std::floor(u); }

// Σ_j c_j s^j and its antiderivative from 0.
double horner(std::span<const double> c, double s) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * s + *it;
  return v;
}

double horner_integral(std::span<const double> c, double s) {
  double v = 0.0;
  for (std::size_t j = c.size(); j-- > 0;) v = v * s + c[j] / static_cast<double>(j + 1);
  return v * s;
}

}  // namespace

std::vector<double> detail::hermite_quintic(double v0, double d0, double dd0, double v1,
                                            double d1, double dd1) {
  Eigen::Matrix<double, 6, 6> m = Eigen::Matrix<double, 6, 6>::Zero();
  Eigen::Matrix<double, 6, 1> rhs;
  rhs << v0, d0, dd0, v1, d1, dd1;
  for (int end = 0; end < 2; ++end) {
    const double s = end == 0 ? -1.0 : 1.0;
    for (int j = 0; j < 6; ++j) {
      m(3 * end, j) = std::pow(s, j);
      m(3 * end + 1, j) = j >= 1 ? j * std::pow(s, j - 1) : 0.0;
      m(3 * end + 2, j) = j >= 2 ? j * (j - 1) * std::pow(s, j - 2) : 0.0;
    }
  }
  const Eigen::Matrix<double, 6, 1> c = m.fullPivLu().solve(rhs);
  return {c.data(), c.data() + 6};
}

// ---------------------------------------------------------------------------
// PeriodicDrift

PeriodicDrift::PeriodicDrift(std::vector<double> sin_coeffs, std::vector<double> cos_coeffs)
    : sin_(std::move(sin_coeffs)), cos_(std::move(cos_coeffs)) {
  const auto n = std::max(sin_.size(), cos_.size());
  sin_.resize(n, 0.0);
  cos_.resize(n, 0.0);
  while (!sin_.empty() && sin_.back() == 0.0 && cos_.back() == 0.0) {
    sin_.pop_back();
    cos_.pop_back();
  }
}

PeriodicDrift PeriodicDrift::sine(double beta) { return PeriodicDrift({-kTwoPi * beta}, {}); }

double PeriodicDrift::operator()(double u) const {
  if (sin_.empty()) return 0.0;
  const double theta = kTwoPi * frac(u);
  const double s1 = std::sin(theta);
  const double c1 = std::cos(theta);
  double sk = s1;
  double ck = c1;
  double v = 0.0;
  for (std::size_t k = 0; k < sin_.size(); ++k) {
    v += sin_[k] * sk + cos_[k] * ck;
    const double sn = sk * c1 + ck * s1;
    ck = ck * c1 - sk * s1;
    sk = sn;
  }
  return v;
}

double PeriodicDrift::derivative(double u) const {
  double v = 0.0;
  const double theta = kTwoPi * frac(u);
  for (std::size_t k = 0; k < sin_.size(); ++k) {
    const double w = kTwoPi * static_cast<double>(k + 1);
    const double arg = static_cast<double>(k + 1) * theta;
    v += w * (sin_[k] * std::cos(arg) - cos_[k] * std::sin(arg));
  }
  return v;
}

double PeriodicDrift::second_derivative(double u) const {
  double v = 0.0;
  const double theta = kTwoPi * frac(u);
  for (std::size_t k = 0; k < sin_.size(); ++k) {
    const double w = kTwoPi * static_cast<double>(k + 1);
    const double arg = static_cast<double>(k + 1) * theta;
    v -= w * w * (sin_[k] * std::sin(arg) + cos_[k] * std::cos(arg));
  }
  return v;
}

double PeriodicDrift::potential(double u) const {
  double v = 0.0;
  const double theta = kTwoPi * frac(u);
  for (std::size_t k = 0; k < sin_.size(); ++k) {
    const double w = kTwoPi * static_cast<double>(k + 1);
    const double arg = static_cast<double>(k + 1) * theta;
    v += (sin_[k] * (1.0 - std::cos(arg)) + cos_[k] * std::sin(arg)) / w;
  }
  return v;
}

bool PeriodicDrift::is_zero() const { return sin_.empty(); }

double PeriodicDrift::sup_norm() const {
  if (is_zero()) return 0.0;
  constexpr int n = 4096;
  double m = 0.0;
  for (int i = 0; i < n; ++i) m = std::max(m, std::abs((*this)(static_cast<double>(i) / n)));
  return m;
}

PeriodicDrift PeriodicDrift::negated() const {
  auto s = sin_;
  auto c = cos_;
  for (auto& v : s) v = -v;
  for (auto& v : c) v = -v;
  return {std::move(s), std::move(c)};
}

std::string to_string(InterfaceKind kind) {
  switch (kind) {
    case InterfaceKind::zero:
      return "zero";
    case InterfaceKind::blend:
      return "blend";
    case InterfaceKind::polynomial:
      return "polynomial";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// DriftSpec

DriftSpec::DriftSpec(PeriodicDrift left, PeriodicDrift right, double eta, InterfaceKind kind,
                     std::vector<double> poly)
    : left_(std::move(left)), right_(std::move(right)), eta_(eta), kind_(kind) {
  if (!(eta_ > 0.0) || !std::isfinite(eta_)) throw ConfigError("interface half-width must be positive");
  switch (kind_) {
    case InterfaceKind::zero:
      break;
    case InterfaceKind::blend:
      iface_ = detail::hermite_quintic(left_(0.0), eta_ * left_.derivative(0.0),
                               eta_ * eta_ * left_.second_derivative(0.0), right_(0.0),
                               eta_ * right_.derivative(0.0),
                               eta_ * eta_ * right_.second_derivative(0.0));
      break;
    case InterfaceKind::polynomial:
      if (poly.empty()) throw ConfigError("polynomial interface needs at least one coefficient");
      iface_.resize(poly.size());
      for (std::size_t j = 0; j < poly.size(); ++j) iface_[j] = poly[j] * std::pow(eta_, j);
      break;
  }
  const double jump_right = std::abs(interface_drift(eta_) - right_(0.0));
  const double jump_left = std::abs(interface_drift(-eta_) - left_(0.0));
  if (jump_right > kContinuityTol || jump_left > kContinuityTol) {
    throw ConfigError("drift is discontinuous at the interface (jumps " + std::to_string(jump_left) +
                      " at -eta, " + std::to_string(jump_right) + " at +eta)");
  }
  v_right_ = interface_potential(eta_);
  v_left_ = interface_potential(-eta_);

  double m = std::max(left_.sup_norm(), right_.sup_norm());
  if (!iface_.empty()) {
    for (int i = 0; i <= 2048; ++i) m = std::max(m, std::abs(horner(iface_, -1.0 + i / 1024.0)));
  }
  sup_norm_ = m;
}

DriftSpec DriftSpec::zero_drift(double eta) { return DriftSpec({}, {}, eta); }

double DriftSpec::interface_drift(double x) const {
  if (iface_.empty()) return 0.0;
  return horner(iface_, x / eta_);
}

double DriftSpec::interface_potential(double x) const {
  if (iface_.empty()) return 0.0;
  return eta_ * horner_integral(iface_, x / eta_);
}

double DriftSpec::drift(double x) const {
  if (x > eta_) return right_(x - eta_);
  if (x < -eta_) return left_(x + eta_);
  return interface_drift(x);
}

double DriftSpec::potential(double x) const {
  if (x > eta_) return v_right_ + right_.potential(x - eta_);
  if (x < -eta_) return v_left_ + left_.potential(x + eta_);
  return interface_potential(x);
}

DriftSpec DriftSpec::mirrored() const {
  auto mirror = [](const PeriodicDrift& d) {
    std::vector<double> s(d.sin_coeffs().begin(), d.sin_coeffs().end());
    std::vector<double> c(d.cos_coeffs().begin(), d.cos_coeffs().end());
    for (auto& v : c) v = -v;
    return PeriodicDrift(std::move(s), std::move(c));
  };
  std::vector<double> poly;
  if (kind_ == InterfaceKind::polynomial) {
    for (std::size_t j = 0; j < iface_.size(); ++j) {
      const double sign = (j % 2 == 0) ? -1.0 : 1.0;
      poly.push_back(sign * iface_[j] / std::pow(eta_, j));
    }
  }
  return DriftSpec(mirror(right_), mirror(left_), eta_, kind_, std::move(poly));
}

bool DriftSpec::operator==(const DriftSpec& other) const {
  return left_ == other.left_ && right_ == other.right_ && eta_ == other.eta_ &&
         kind_ == other.kind_ && iface_ == other.iface_;
}

double eval_drift(const DriftSpec& spec, double x) { return spec.drift(x); }
double eval_potential(const DriftSpec& spec, double x) { return spec.potential(x); }
double integrating_factor(const DriftSpec& spec, double u) {
  return std::exp(-2.0 * spec.potential(u));
}

// ---------------------------------------------------------------------------
// ExpPotentialIntegral

ExpPotentialIntegral::ExpPotentialIntegral(const DriftSpec& spec, int sign)
    : spec_(spec), sign_(sign >= 0 ? 1 : -1) {
  const double eta = spec_.eta();
  auto f = [this](double u) { return integrand(u); };
  at_right_edge_ = integrate(f, 0.0, eta).value;
  at_left_edge_ = -integrate(f, -eta, 0.0).value;
  right_period_ = integrate(f, eta, eta + 1.0).value;
  left_period_ = integrate(f, -eta - 1.0, -eta).value;
}

double ExpPotentialIntegral::integrand(double u) const {
  return std::exp(2.0 * sign_ * spec_.potential(u));
}

double ExpPotentialIntegral::partial_right(double fr) const {
  const double eta = spec_.eta();
  return integrate([this](double u) { return integrand(u); }, eta, eta + fr).value;
}

double ExpPotentialIntegral::partial_left(double fr) const {
  const double eta = spec_.eta();
  return integrate([this](double u) { return integrand(u); }, -eta - fr, -eta).value;
}

double ExpPotentialIntegral::operator()(double z) const {
  const double eta = spec_.eta();
  auto f = [this](double u) { return integrand(u); };
  if (z > eta) {
    const double len = z - eta;
    const double whole = std::floor(len);
    return at_right_edge_ + whole * right_period_ + partial_right(len - whole);
  }
  if (z < -eta) {
    const double len = -eta - z;
    const double whole = std::floor(len);
    return at_left_edge_ - whole * left_period_ - partial_left(len - whole);
  }
  if (z >= 0.0) return integrate(f, 0.0, z).value;
  return -integrate(f, z, 0.0).value;
}

}  // namespace ihom
