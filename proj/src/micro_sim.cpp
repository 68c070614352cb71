#include "ihom/micro_sim.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "ihom/errors.hpp"
#include "ihom/parallel.hpp"
#include "ihom/quadrature.hpp"
#include "ihom/rng.hpp"

namespace ihom {
namespace {

constexpr double kStepFactor = 0.1;

std::size_t step_count(double horizon, double dt) {
  return static_cast<std::size_t>(std::ceil(horizon / dt * (1.0 - 1e-12)));
}

// ∫₀ᵀ φ_t(z) dt
double occupation_profile(double z, double horizon) {
  const double a = std::abs(z);
  return std::sqrt(2.0 * horizon / std::numbers::pi) * std::exp(-0.5 * a * a / horizon) -
         a * std::erfc(a / std::sqrt(2.0 * horizon));
}

}  // namespace

double max_time_step(double sup_drift, double eps) {
  const double d = 1.0 + sup_drift;
  return kStepFactor * eps * eps / (d * d);
}

double max_time_step(const DriftSpec& spec, double eps) {
  return max_time_step(spec.sup_norm(), eps);
}

// ---------------------------------------------------------------------------
// PathEnsemble

PathEnsemble::PathEnsemble(DriftSpec spec, SimConfig config, double dt, std::size_t steps,
                           std::vector<double> times)
    : spec_(std::move(spec)),
      config_(config),
      dt_(dt),
      steps_(steps),
      times_(std::move(times)),
      values_(config.paths * times_.size(), 0.0) {}

std::span<const double> PathEnsemble::path(std::size_t i) const {
  return std::span<const double>(values_).subspan(i * times_.size(), times_.size());
}

std::span<double> PathEnsemble::path(std::size_t i) {
  return std::span<double>(values_).subspan(i * times_.size(), times_.size());
}

std::size_t PathEnsemble::time_index(double t) const {
  for (std::size_t k = 0; k < times_.size(); ++k) {
    if (std::abs(times_[k] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return k;
  }
  throw DomainError("time " + std::to_string(t) + " is not an output time of the ensemble");
}

std::vector<double> PathEnsemble::values_at(double t) const {
  const auto k = time_index(t);
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = path(i)[k];
  return out;
}

// ---------------------------------------------------------------------------
// Simulation

PathEnsemble simulate_micro(const DriftSpec& spec, const SimConfig& cfg,
                            std::span<const double> output_times,
                            std::optional<HistogramSpec> histogram) {
  if (!(cfg.eps > 0.0 && cfg.eps <= 1.0)) throw ConfigError("eps must lie in (0, 1]");
  if (!(cfg.horizon > 0.0)) throw ConfigError("horizon must be positive");
  if (cfg.paths < 1) throw ConfigError("need at least one path");
  const double dt_max = max_time_step(spec, cfg.eps);
  if (cfg.dt > dt_max * (1.0 + 1e-12)) {
    throw ConfigError("time step " + std::to_string(cfg.dt) + " exceeds the resolution limit " +
                      std::to_string(dt_max));
  }
  const std::size_t steps = step_count(cfg.horizon, cfg.dt > 0.0 ? cfg.dt : dt_max);
  const double dt = cfg.horizon / static_cast<double>(steps);

  std::vector<double> times(output_times.begin(), output_times.end());
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < 0.0 || times[k] > cfg.horizon * (1.0 + 1e-12)) {
      throw DomainError("output time outside [0, horizon]");
    }
    if (k > 0 && !(times[k] > times[k - 1])) throw DomainError("output times must increase");
  }

  PathEnsemble ens(spec, cfg, dt, steps, times);
  std::vector<std::uint64_t> counts;
  std::mutex counts_mutex;
  if (histogram) {
    if (histogram->bins < 1 || !(histogram->hi > histogram->lo)) {
      throw ConfigError("invalid histogram specification");
    }
    counts.assign(histogram->bins, 0);
  }

  const double eps = cfg.eps;
  const double h = dt / (eps * eps);  // step in microscopic time
  if (cfg.substeps < 1) throw ConfigError("substeps must be positive");
  const int substeps = cfg.substeps;
  const double noise = std::sqrt(h / substeps);
  const auto n_out = times.size();

  parallel_for(cfg.paths, cfg.workers, [&](std::size_t i) {
    RandomStream rng(cfg.seed, StreamTag::micro_paths, static_cast<std::uint32_t>(i));
    auto out = ens.path(i);
    std::vector<std::uint64_t> local;
    const HistogramSpec hs = histogram.value_or(HistogramSpec{});
    const double inv_width = 1.0 / hs.width();
    if (histogram) local.assign(hs.bins, 0);
    auto deposit = [&](double x) {
      const double pos = (x - hs.lo) * inv_width;
      if (pos >= 0.0 && pos < hs.bins) ++local[static_cast<std::size_t>(pos)];
    };

    double x = cfg.x0 / eps;  // microscopic coordinate
    std::size_t k = 0;
    while (k < n_out && times[k] <= 0.0) out[k++] = cfg.x0;
    if (histogram) deposit(cfg.x0);
    for (std::size_t n = 0; n < steps; ++n) {
      double z = rng.normal();
      for (int j = 1; j < substeps; ++j) z += rng.normal();
      const double next = x + spec.drift(x) * h + noise * z;
      const double t1 = static_cast<double>(n + 1) * dt;
      while (k < n_out && (times[k] <= t1 || n + 1 == steps)) {
        const double w = (times[k] - static_cast<double>(n) * dt) / dt;
        out[k++] = eps * ((1.0 - w) * x + w * next);
      }
      x = next;
      if (histogram) {
        // trapezoidal occupation: half a step at each end point
        deposit(eps * x);
        if (n + 1 < steps) deposit(eps * x);
      }
    }
    if (histogram) {
      std::lock_guard lock(counts_mutex);
      for (int b = 0; b < hs.bins; ++b) counts[b] += local[b];
    }
  });

  if (histogram) {
    Histogram hist{*histogram, std::vector<double>(histogram->bins)};
    const double total = 2.0 * static_cast<double>(steps) * static_cast<double>(cfg.paths);
    for (int b = 0; b < histogram->bins; ++b) hist.mass[b] = static_cast<double>(counts[b]) / total;
    ens.occupation_ = std::move(hist);
  }
  return ens;
}

PathEnsemble compensated(const PathEnsemble& ensemble, const Compensator& compensator) {
  if (!(compensator.spec() == ensemble.spec())) {
    throw SpecMismatch("compensator was built for a different drift");
  }
  PathEnsemble out = ensemble;
  const double eps = ensemble.config().eps;
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (double& v : out.path(i)) v += eps * compensator.value(v / eps);
  }
  out.compensated_ = true;
  return out;
}

// ---------------------------------------------------------------------------
// Estimators

Proportion sign_fraction(const PathEnsemble& ensemble, double t) {
  const auto values = ensemble.values_at(t);
  std::size_t positive = 0;
  for (double v : values) positive += v > 0.0 ? 1 : 0;
  const double n = static_cast<double>(values.size());
  const double f = static_cast<double>(positive) / n;
  return {f, std::sqrt(f * (1.0 - f) / n)};
}

Histogram empirical_density(const PathEnsemble& ensemble, int merge) {
  if (!ensemble.occupation()) throw DomainError("ensemble was simulated without a histogram");
  const Histogram& fine = *ensemble.occupation();
  if (merge < 1 || fine.spec.bins % merge != 0) {
    throw DomainError("merge factor must divide the number of recorded bins");
  }
  Histogram out{HistogramSpec{fine.spec.lo, fine.spec.hi, fine.spec.bins / merge}, {}};
  out.mass.assign(out.spec.bins, 0.0);
  for (int b = 0; b < fine.spec.bins; ++b) out.mass[b / merge] += fine.mass[b];
  return out;
}

double binning_tv_distance(const Histogram& fine, int merge) {
  if (merge < 1 || fine.spec.bins % merge != 0) throw DomainError("bad merge factor");
  double tv = 0.0;
  for (int b0 = 0; b0 < fine.spec.bins; b0 += merge) {
    double block = 0.0;
    for (int b = b0; b < b0 + merge; ++b) block += fine.mass[b];
    for (int b = b0; b < b0 + merge; ++b) tv += std::abs(fine.mass[b] - block / merge);
  }
  return 0.5 * tv;
}

PlateauRatio occupation_plateau_ratio(const Histogram& hist, const SkewParams& params,
                                      double horizon, double inner, double outer) {
  CompensatedSum right_mass;
  CompensatedSum right_profile;
  CompensatedSum left_mass;
  CompensatedSum left_profile;
  const double tol = 1e-9 * hist.spec.width();
  for (int b = 0; b < hist.spec.bins; ++b) {
    const double a = hist.bin_left(b);
    const double c = hist.bin_right(b);
    if (a >= inner - tol && c <= outer + tol) {
      right_mass.add(hist.mass[b]);
      right_profile.add(
          integrate([&](double y) { return 2.0 * occupation_profile(y / params.C_plus, horizon); },
                    a, c)
              .value);
    } else if (c <= -inner + tol && a >= -outer - tol) {
      left_mass.add(hist.mass[b]);
      left_profile.add(
          integrate([&](double y) { return 2.0 * occupation_profile(y / params.C_minus, horizon); },
                    a, c)
              .value);
    }
  }
  if (right_profile.value() == 0.0 || left_profile.value() == 0.0) {
    throw DomainError("no histogram bins inside the plateau window");
  }
  PlateauRatio out;
  out.right_level = right_mass.value() / right_profile.value();
  out.left_level = left_mass.value() / left_profile.value();
  out.ratio = out.right_level / out.left_level;
  return out;
}

std::pair<double, double> quadratic_variation_rates(const PathEnsemble& ensemble, double margin) {
  const auto times = ensemble.times();
  CompensatedSum qv_right;
  CompensatedSum time_right;
  CompensatedSum qv_left;
  CompensatedSum time_left;
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const auto path = ensemble.path(i);
    for (std::size_t k = 1; k < path.size(); ++k) {
      const double a = path[k - 1];
      const double b = path[k];
      const double dt = times[k] - times[k - 1];
      if (a > margin) {
        qv_right.add((b - a) * (b - a));
        time_right.add(dt);
      } else if (a < -margin) {
        qv_left.add((b - a) * (b - a));
        time_left.add(dt);
      }
    }
  }
  const double right = time_right.value() > 0.0 ? qv_right.value() / time_right.value() : 0.0;
  const double left = time_left.value() > 0.0 ? qv_left.value() / time_left.value() : 0.0;
  return {right, left};
}

HarmonicCoordinate::HarmonicCoordinate(const DriftSpec& spec, double eps)
    : eps_(eps), integral_(spec, -1) {}

double harmonic_coordinate(const DriftSpec& spec, double eps, double x) {
  return HarmonicCoordinate(spec, eps)(x);
}

MeanEstimate harmonic_drift(const PathEnsemble& ensemble, double t) {
  const HarmonicCoordinate coord(ensemble.spec(), ensemble.config().eps);
  const auto k0 = ensemble.time_index(ensemble.times().front());
  const auto k = ensemble.time_index(t);
  std::vector<double> diffs(ensemble.size());
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const auto path = ensemble.path(i);
    diffs[i] = coord(path[k]) - coord(path[k0]);
  }
  return mean_and_error(diffs);
}

// ---------------------------------------------------------------------------
// Averaging residual

AveragingStudy averaging_residual(const PeriodicDrift& drift,
                                  const std::function<double(double)>& F,
                                  const std::function<double(double)>& h,
                                  const AveragingOptions& opt) {
  const auto levels = opt.eps_grid.size();
  if (levels == 0) throw ConfigError("empty eps grid");
  const double sup = drift.sup_norm();

  // Step counts m·2^j with m the smallest required count, so every level's
  // grid is a coarsening of the finest one.
  std::vector<std::size_t> needed(levels);
  for (std::size_t l = 0; l < levels; ++l) {
    const double eps = opt.eps_grid[l];
    if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("eps must lie in (0, 1]");
    needed[l] = step_count(opt.horizon, max_time_step(sup, eps));
  }
  const std::size_t base = *std::min_element(needed.begin(), needed.end());
  std::vector<std::size_t> steps(levels);
  for (std::size_t l = 0; l < levels; ++l) {
    std::size_t n = base;
    while (n < needed[l]) n *= 2;
    steps[l] = n;
  }
  const std::size_t fine = *std::max_element(steps.begin(), steps.end());
  const double dt_fine = opt.horizon / static_cast<double>(fine);

  std::vector<std::vector<double>> samples(levels, std::vector<double>(opt.paths));
  parallel_for(opt.paths, opt.workers, [&](std::size_t i) {
    RandomStream rng(opt.seed, StreamTag::averaging, static_cast<std::uint32_t>(i));
    struct Level {
      double eps, dt, h, x, discount, decay, weight, acc, increment;
      std::size_t ratio, filled;
    };
    std::vector<Level> state(levels);
    for (std::size_t l = 0; l < levels; ++l) {
      const double eps = opt.eps_grid[l];
      const double dt = opt.horizon / static_cast<double>(steps[l]);
      const double decay = std::exp(-opt.lambda * dt);
      const double weight = opt.lambda > 0.0 ? (1.0 - decay) / opt.lambda : dt;
      state[l] = Level{eps, dt, dt / (eps * eps), opt.x0 / eps, 1.0, decay, weight, 0.0, 0.0,
                       fine / steps[l], 0};
    }
    const double sqrt_fine = std::sqrt(dt_fine);
    for (std::size_t j = 0; j < fine; ++j) {
      const double dw = sqrt_fine * rng.normal();
      for (auto& s : state) {
        s.increment += dw;
        if (++s.filled < s.ratio) continue;
        // left-point rule for ∫ e^{-λs} F(X) h(X/ε) ds over this step
        const double macro = s.eps * s.x;
        s.acc += s.discount * s.weight * F(macro) * h(s.x);
        s.x += drift(s.x) * s.h + s.increment / s.eps;
        s.discount *= s.decay;
        s.increment = 0.0;
        s.filled = 0;
      }
    }
    for (std::size_t l = 0; l < levels; ++l) samples[l][i] = state[l].acc;
  });

  AveragingStudy out;
  out.eps = opt.eps_grid;
  out.steps = steps;
  bool all_zero = true;
  std::vector<double> abs_mean;
  for (std::size_t l = 0; l < levels; ++l) {
    const auto m = mean_and_error(samples[l]);
    out.mean.push_back(m.mean);
    out.std_error.push_back(m.std_error);
    abs_mean.push_back(std::abs(m.mean));
    all_zero = all_zero && m.mean == 0.0 && m.std_error == 0.0;
  }
  if (!all_zero && levels >= 3) {
    try {
      out.fit = fit_rate(out.eps, abs_mean);
    } catch (const DegenerateFit&) {
      out.fit.reset();
    }
  }
  return out;
}

}  // namespace ihom
