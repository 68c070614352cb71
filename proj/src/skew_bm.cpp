#include "ihom/skew_bm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ihom/errors.hpp"
#include "ihom/quadrature.hpp"
#include "ihom/stats.hpp"

namespace ihom {
namespace {

double gauss_pdf(double z, double t) {
  return std::exp(-0.5 * z * z / t) / std::sqrt(2.0 * std::numbers::pi * t);
}

// Φ(z / √t) through erfc so that both tails keep their relative accuracy.
double gauss_cdf(double z, double t) { return 0.5 * std::erfc(-z / std::sqrt(2.0 * t)); }

void require_positive_time(double t) {
  if (!(t > 0.0)) throw DomainError("transition kernel needs t > 0");
}

// ∫ f over ℝ, split at the kink z = 0.
template <class F>
double whole_line(const F& f, double t) {
  const double L = 40.0 * std::sqrt(t) + 5.0;
  return integrate(f, -L, 0.0).value + integrate(f, 0.0, L).value;
}

}  // namespace

void SkewParams::validate() const {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("skewness p must lie in (0, 1)");
  if (!(C_plus > 0.0 && C_minus > 0.0)) throw DomainError("C+ and C- must be positive");
}

SkewParams skew_params(const HomogenizedParams& hp) {
  return SkewParams{hp.p, hp.C_plus, hp.C_minus};
}

double g_map(const SkewParams& params, double x) {
  return x >= 0.0 ? params.C_plus * x : params.C_minus * x;
}

double g_inverse(const SkewParams& params, double y) {
  return y >= 0.0 ? y / params.C_plus : y / params.C_minus;
}

double skew_transition_density(const SkewParams& params, double t, double x, double y) {
  require_positive_time(t);
  const double skew = 2.0 * params.p - 1.0;
  const double sgn = y > 0.0 ? 1.0 : (y < 0.0 ? -1.0 : 0.0);
  return gauss_pdf(y - x, t) + sgn * skew * gauss_pdf(std::abs(x) + std::abs(y), t);
}

double skew_transition_cdf(const SkewParams& params, double t, double x, double y) {
  require_positive_time(t);
  const double skew = 2.0 * params.p - 1.0;
  const double ax = std::abs(x);
  if (y < 0.0) return gauss_cdf(y - x, t) - skew * gauss_cdf(y - ax, t);
  // mass of (-∞, 0] plus the reflected term on (0, y]
  return gauss_cdf(y - x, t) - skew * gauss_cdf(-ax, t) +
         skew * (gauss_cdf(ax + y, t) - gauss_cdf(ax, t));
}

DensityGate skew_density_gate(const SkewParams& params) {
  params.validate();
  const double p = params.p;
  auto q = [&](double t, double x, double y) { return skew_transition_density(params, t, x, y); };
  DensityGate gate;
  for (double t : {0.1, 1.0}) {
    for (double x : {-1.0, 0.0, 0.3, 2.0}) {
      const double mass = whole_line([&](double y) { return q(t, x, y); }, t);
      gate.normalization = std::max(gate.normalization, std::abs(mass - 1.0));
    }
  }
  const double s = 0.3;
  const double t = 0.5;
  for (double x : {-1.0, 0.0, 0.4}) {
    for (double y : {-0.5, 0.2, 1.0}) {
      const double lhs = whole_line([&](double z) { return q(s, x, z) * q(t, z, y); }, s + t);
      gate.chapman_kolmogorov = std::max(gate.chapman_kolmogorov, std::abs(lhs - q(s + t, x, y)));
    }
  }
  constexpr double h = 1e-6;
  constexpr double tiny = 1e-300;
  for (double y : {-1.2, -0.4, 0.5, 1.7}) {
    const double right = (-3.0 * q(t, 0.0, y) + 4.0 * q(t, h, y) - q(t, 2 * h, y)) / (2 * h);
    const double left = (3.0 * q(t, 0.0, y) - 4.0 * q(t, -h, y) + q(t, -2 * h, y)) / (2 * h);
    gate.flux = std::max(gate.flux, std::abs(p * right - (1.0 - p) * left));
  }
  for (double x : {-0.8, 0.0, 0.9}) {
    gate.jump = std::max(gate.jump, std::abs((1.0 - p) * q(t, x, tiny) - p * q(t, x, -tiny)));
  }
  return gate;
}

double limit_transition_density(const SkewParams& params, double t, double x, double y) {
  const double jac = y >= 0.0 ? 1.0 / params.C_plus : 1.0 / params.C_minus;
  return jac * skew_transition_density(params, t, g_inverse(params, x), g_inverse(params, y));
}

double limit_transition_cdf(const SkewParams& params, double t, double x, double y) {
  return skew_transition_cdf(params, t, g_inverse(params, x), g_inverse(params, y));
}

double sample_skew_increment(const SkewParams& params, double t, double x, RandomStream& rng) {
  require_positive_time(t);
  const double u = rng.uniform();
  const double sd = std::sqrt(t);
  double lo = std::min(x, 0.0) - 40.0 * sd;
  double hi = std::max(x, 0.0) + 40.0 * sd;
  double y = x;
  for (int it = 0; it < 200; ++it) {
    const double f = skew_transition_cdf(params, t, x, y) - u;
    if (std::abs(f) <= 1e-12) return y;
    if (f > 0.0) {
      hi = y;
    } else {
      lo = y;
    }
    const double dens = skew_transition_density(params, t, x, y);
    double next = dens > 0.0 ? y - f / dens : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 1e-15 * std::max(1.0, std::abs(y))) return next;
    y = next;
  }
  throw RootFindFailure("skew BM inversion did not converge");
}

PathSample sample_limit_path(const SkewParams& params, std::span<const double> grid, double x0,
                             RandomStream& rng) {
  params.validate();
  PathSample out;
  out.times.assign(grid.begin(), grid.end());
  out.values.reserve(grid.size());
  if (grid.empty()) return out;
  double z = g_inverse(params, x0);
  out.values.push_back(x0);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double dt = grid[i] - grid[i - 1];
    if (!(dt > 0.0)) throw DomainError("time grid must be strictly increasing");
    z = sample_skew_increment(params, dt, z, rng);
    out.values.push_back(g_map(params, z));
  }
  return out;
}

DomainCheck check_domain_condition(const SkewParams& params, const PiecewiseFunction& f,
                                   const DomainCheckOptions& opt) {
  params.validate();
  std::vector<double> grid(opt.steps + 1);
  for (int i = 0; i <= opt.steps; ++i) grid[i] = opt.horizon * i / opt.steps;
  const double h = opt.horizon / opt.steps;
  auto generator = [&](double x) {
    const double c = x >= 0.0 ? params.C_plus : params.C_minus;
    return 0.5 * c * c * f.second_derivative(x);
  };

  std::vector<double> samples(opt.paths);
  for (std::size_t k = 0; k < opt.paths; ++k) {
    RandomStream rng(opt.seed, StreamTag::limit_paths, static_cast<std::uint32_t>(k));
    const auto path = sample_limit_path(params, grid, opt.x0, rng);
    double integral = 0.5 * (generator(path.values.front()) + generator(path.values.back()));
    for (int i = 1; i < opt.steps; ++i) integral += generator(path.values[i]);
    integral *= h;
    samples[k] = f.value(path.values.back()) - f.value(path.values.front()) - integral;
  }
  const auto m = mean_and_error(samples);
  return DomainCheck{m.mean, m.std_error, opt.paths};
}

}  // namespace ihom
