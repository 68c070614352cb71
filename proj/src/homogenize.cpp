#include "ihom/homogenize.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>

#include "ihom/errors.hpp"
#include "ihom/quadrature.hpp"

namespace ihom {
namespace {

constexpr double kRouteTol = 1e-8;
constexpr double kBlendMargin = 0.01;
constexpr int kMaxBlendGrowth = 40;

double frac(double u) { return u - std::floor(u); }

// Minimum of f on [a, b]: grid scan, then Brent refinement around the best node.
template <class F>
double refined_min(const F& f, double a, double b, int samples = 1024) {
  int best = 0;
  double best_value = f(a);
  for (int i = 1; i <= samples; ++i) {
    const double v = f(a + (b - a) * i / samples);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  const double lo = a + (b - a) * std::max(best - 1, 0) / samples;
  const double hi = a + (b - a) * std::min(best + 1, samples) / samples;
  const auto [x, v] = boost::math::tools::brent_find_minima(f, lo, hi, 52);
  (void)x;
  return std::min(v, best_value);
}

}  // namespace

// ---------------------------------------------------------------------------
// Corrector

Corrector::Corrector(PeriodicDrift drift, Side side, int grid)
    : drift_(std::move(drift)), side_(side), grid_(grid), zero_(drift_.is_zero()) {
  if (grid_ < 1) throw DomainError("corrector grid must have at least one cell");
  auto inv_density = [this](double u) { return std::exp(-2.0 * drift_.potential(u)); };
  auto density = [this](double u) { return std::exp(2.0 * drift_.potential(u)); };

  const double total = integrate(inv_density, 0.0, 1.0).value;
  partition_ = integrate(density, 0.0, 1.0).value;
  normalizer_ = 1.0 / total;

  cumulative_.assign(grid_ + 1, 0.0);
  for (int i = 0; i < grid_; ++i) {
    const double a = static_cast<double>(i) / grid_;
    const double b = static_cast<double>(i + 1) / grid_;
    cumulative_[i + 1] = cumulative_[i] + gauss_panel(inv_density, a, b);
  }
  if (std::abs(cumulative_.back() - total) > 1e-11 * total) {
    throw QuadratureFailure("corrector table does not reproduce the period integral");
  }

  // g(u) = c·I(u) - u + offset, centred against μ.
  auto uncentred = [this, density](double u) {
    return (normalizer_ * primitive(u) - u) * density(u);
  };
  QuadratureOptions opt;
  opt.abs_tol = 1e-17 * partition_;
  const double weighted = integrate(uncentred, 0.0, 1.0, opt).value;
  offset_ = -weighted / partition_;

  sup_abs_ = -refined_min([this](double u) { return -std::abs(value(u)); }, 0.0, 1.0);
  min_slope_ = refined_min([this](double u) { return 1.0 + derivative(u); }, 0.0, 1.0);
}

double Corrector::primitive(double u) const {
  auto inv_density = [this](double v) { return std::exp(-2.0 * drift_.potential(v)); };
  const auto cell = std::min(static_cast<int>(u * grid_), grid_ - 1);
  const double a = static_cast<double>(cell) / grid_;
  return cumulative_[cell] + gauss_panel(inv_density, a, u);
}

double Corrector::value(double u) const {
  if (zero_) return 0.0;
  const double r = frac(u);
  return normalizer_ * primitive(r) - r + offset_;
}

double Corrector::derivative(double u) const {
  if (zero_) return 0.0;
  return normalizer_ * std::exp(-2.0 * drift_.potential(u)) - 1.0;
}

double Corrector::second_derivative(double u) const {
  if (zero_) return 0.0;
  return -2.0 * drift_(u) * normalizer_ * std::exp(-2.0 * drift_.potential(u));
}

Corrector solve_corrector(const PeriodicDrift& drift, Side side) { return Corrector(drift, side); }

double effective_coefficient_cell(const Corrector& corr) {
  const auto& drift = corr.drift();
  auto integrand = [&](double u) {
    const double slope = 1.0 + corr.derivative(u);
    return slope * slope * std::exp(2.0 * drift.potential(u));
  };
  return integrate(integrand, 0.0, 1.0).value / corr.partition();
}

double effective_coefficient_product(const PeriodicDrift& drift) {
  const double minus =
      integrate([&](double u) { return std::exp(-2.0 * drift.potential(u)); }, 0.0, 1.0).value;
  const double plus =
      integrate([&](double u) { return std::exp(2.0 * drift.potential(u)); }, 0.0, 1.0).value;
  return 1.0 / (minus * plus);
}

std::pair<double, double> interface_weights(const DriftSpec& spec) {
  auto density = [&](double x) { return std::exp(2.0 * spec.potential(x)); };
  const double eta = spec.eta();
  return {integrate(density, eta, eta + 1.0).value, integrate(density, -eta - 1.0, -eta).value};
}

HomogenizedParams homogenized_params(const DriftSpec& spec) {
  const Corrector right(spec.right(), Side::right);
  const Corrector left(spec.left(), Side::left);

  auto checked = [](const Corrector& corr) {
    const double cell = effective_coefficient_cell(corr);
    const double product = effective_coefficient_product(corr.drift());
    if (std::abs(cell - product) > kRouteTol * product) {
      throw CoefficientMismatch("cell and product formulas for C^2 disagree: " +
                                std::to_string(cell) + " vs " + std::to_string(product));
    }
    return cell;
  };

  HomogenizedParams out;
  out.C_plus = std::sqrt(checked(right));
  out.C_minus = std::sqrt(checked(left));
  out.c_plus = right.normalizer();
  out.c_minus = left.normalizer();
  std::tie(out.lambda_plus, out.lambda_minus) = interface_weights(spec);

  // λ₊/λ₋ = p C₋ / ((1 - p) C₊)
  const double odds = out.lambda_plus * out.C_plus / (out.lambda_minus * out.C_minus);
  out.p = odds / (1.0 + odds);
  out.q = 1.0 / (1.0 + odds);
  // p₊/p₋ = λ₊C₊² / (λ₋C₋²)
  const double exit_odds = out.lambda_plus * out.C_plus * out.C_plus /
                           (out.lambda_minus * out.C_minus * out.C_minus);
  out.p_plus = exit_odds / (1.0 + exit_odds);
  out.p_minus = 1.0 / (1.0 + exit_odds);
  return out;
}

// ---------------------------------------------------------------------------
// Compensator

Compensator::Compensator(const DriftSpec& spec)
    : spec_(spec),
      left_(spec.left(), Side::left),
      right_(spec.right(), Side::right),
      halfwidth_(spec.eta()) {
  // The blend must keep 1 + g' away from zero; the periodic parts fix how far
  // that is possible.
  const double required =
      std::min(kBlendMargin, 0.5 * std::min(left_.min_slope(), right_.min_slope()));
  for (int attempt = 0; attempt <= kMaxBlendGrowth; ++attempt) {
    build_blend();
    const double slope =
        refined_min([this](double x) { return 1.0 + derivative(x); }, -halfwidth_, halfwidth_);
    if (slope > required) {
      min_slope_ = std::min({slope, left_.min_slope(), right_.min_slope()});
      const double blend_sup = -refined_min([this](double x) { return -std::abs(value(x)); },
                                            -halfwidth_, halfwidth_);
      sup_abs_ = std::max({blend_sup, left_.sup_abs(), right_.sup_abs()});
      return;
    }
    halfwidth_ += 0.5;
  }
  throw ConfigError("could not blend the correctors with g' > -1 across the interface");
}

double Compensator::outer_value(double x) const {
  return x > 0.0 ? right_.value(x - spec_.eta()) : left_.value(x + spec_.eta());
}

double Compensator::outer_derivative(double x) const {
  return x > 0.0 ? right_.derivative(x - spec_.eta()) : left_.derivative(x + spec_.eta());
}

double Compensator::outer_second(double x) const {
  return x > 0.0 ? right_.second_derivative(x - spec_.eta())
                 : left_.second_derivative(x + spec_.eta());
}

void Compensator::build_blend() {
  const double w = halfwidth_;
  blend_ = detail::hermite_quintic(outer_value(-w), w * outer_derivative(-w),
                                   w * w * outer_second(-w), outer_value(w),
                                   w * outer_derivative(w), w * w * outer_second(w));
}

double Compensator::value(double x) const {
  if (std::abs(x) >= halfwidth_) return outer_value(x);
  const double s = x / halfwidth_;
  double v = 0.0;
  for (auto it = blend_.rbegin(); it != blend_.rend(); ++it) v = v * s + *it;
  return v;
}

double Compensator::derivative(double x) const {
  if (std::abs(x) >= halfwidth_) return outer_derivative(x);
  const double s = x / halfwidth_;
  double v = 0.0;
  for (std::size_t j = blend_.size(); j-- > 1;) v = v * s + static_cast<double>(j) * blend_[j];
  return v / halfwidth_;
}

}  // namespace ihom
