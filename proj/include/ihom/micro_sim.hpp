#pragma once

// Euler–Maruyama simulation of the rescaled diffusion
//   dX^ε = ε^{-1} b(X^ε/ε) dt + dW,
// its compensated version Y^ε = X^ε + ε g(X^ε/ε), and the estimators built
// on top of them.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ihom/drift_model.hpp"
#include "ihom/homogenize.hpp"
#include "ihom/skew_bm.hpp"
#include "ihom/stats.hpp"

namespace ihom {

struct SimConfig {
  double eps = 0.1;
  double horizon = 1.0;
  /// Time step; 0 selects the largest step the resolution rule allows.
  double dt = 0.0;
  std::size_t paths = 1000;
  std::uint64_t seed = 1;
  double x0 = 0.0;
  unsigned workers = 1;
  /// Each Brownian increment is the sum of this many normals, so a run with
  /// step dt and substeps = 2 sees the same noise as a run with dt/2.
  int substeps = 1;
};

/// Largest admissible step 0.1·ε²/(1 + sup|b|)².
double max_time_step(double sup_drift, double eps);
double max_time_step(const DriftSpec& spec, double eps);

/// Uniform bins on [lo, hi] in macroscopic coordinates.
struct HistogramSpec {
  double lo = -1.0;
  double hi = 1.0;
  int bins = 40;

  double width() const { return (hi - lo) / bins; }
};

struct Histogram {
  HistogramSpec spec;
  /// Fraction of the total occupation time spent in each bin.
  std::vector<double> mass;

  double bin_left(int i) const { return spec.lo + i * spec.width(); }
  double bin_right(int i) const { return spec.lo + (i + 1) * spec.width(); }
};

class PathEnsemble {
 public:
  PathEnsemble(DriftSpec spec, SimConfig config, double dt, std::size_t steps,
               std::vector<double> times);

  const DriftSpec& spec() const { return spec_; }
  const SimConfig& config() const { return config_; }
  double dt() const { return dt_; }
  std::size_t steps() const { return steps_; }
  std::span<const double> times() const { return times_; }
  std::size_t size() const { return config_.paths; }
  bool is_compensated() const { return compensated_; }

  std::span<const double> path(std::size_t i) const;
  std::span<double> path(std::size_t i);
  /// Value of every path at output time t (which must be one of times()).
  std::vector<double> values_at(double t) const;
  std::size_t time_index(double t) const;

  const std::optional<Histogram>& occupation() const { return occupation_; }

 private:
  friend PathEnsemble simulate_micro(const DriftSpec&, const SimConfig&, std::span<const double>,
                                     std::optional<HistogramSpec>);
  friend PathEnsemble compensated(const PathEnsemble&, const Compensator&);

  DriftSpec spec_;
  SimConfig config_;
  double dt_;
  std::size_t steps_;
  std::vector<double> times_;
  std::vector<double> values_;
  std::optional<Histogram> occupation_;
  bool compensated_ = false;
};

/// Simulates `cfg.paths` independent paths from cfg.x0 and records them at
/// `output_times` (linear interpolation inside a step). When `histogram` is
/// set, the trapezoidal time-occupation of every path is accumulated.
/// Throws ConfigError if cfg.dt violates the resolution rule.
PathEnsemble simulate_micro(const DriftSpec& spec, const SimConfig& cfg,
                            std::span<const double> output_times,
                            std::optional<HistogramSpec> histogram = std::nullopt);

/// Applies Y = X + ε g(X/ε) to every stored value. Throws SpecMismatch if the
/// compensator belongs to another drift.
PathEnsemble compensated(const PathEnsemble& ensemble, const Compensator& compensator);

struct Proportion {
  double value = 0.0;
  double std_error = 0.0;
};

/// Fraction of paths with X(t) > 0 and its binomial standard error.
Proportion sign_fraction(const PathEnsemble& ensemble, double t);

/// Occupation histogram with `merge` adjacent recorded bins combined.
Histogram empirical_density(const PathEnsemble& ensemble, int merge = 1);

/// Total-variation distance between a histogram and its `merge`-coarsened
/// version spread back uniformly over the fine bins.
double binning_tv_distance(const Histogram& fine, int merge);

struct PlateauRatio {
  double ratio = 0.0;
  double right_level = 0.0;
  double left_level = 0.0;
};

/// Ratio of the right and left occupation plateaus. Each bin with
/// inner ≤ |x| ≤ outer is divided by the limit occupation profile
/// ∫₀ᵀ 2φ_t(x/C±) dt of its side, which flattens both sides to levels in the
/// ratio λ₊/λ₋.
PlateauRatio occupation_plateau_ratio(const Histogram& hist, const SkewParams& params,
                                      double horizon, double inner, double outer);

/// Realised quadratic-variation rate Σ(ΔY)²/Σ Δt over output increments that
/// start beyond `margin` on either side: (right, left).
std::pair<double, double> quadratic_variation_rates(const PathEnsemble& ensemble, double margin);

/// H_ε(x) = ∫₀ˣ e^{-2V(y/ε)} dy, which solves ½H'' + ε^{-1}b(x/ε)H' = 0.
class HarmonicCoordinate {
 public:
  HarmonicCoordinate(const DriftSpec& spec, double eps);
  double operator()(double x) const { return eps_ * integral_(x / eps_); }

 private:
  double eps_;
  ExpPotentialIntegral integral_;
};

double harmonic_coordinate(const DriftSpec& spec, double eps, double x);

/// E[H_ε(X(t))] - H_ε(X(0)) with its standard error.
MeanEstimate harmonic_drift(const PathEnsemble& ensemble, double t);

struct AveragingOptions {
  std::vector<double> eps_grid{0.2, 0.1, 0.05, 0.025};
  double lambda = 1.0;
  double horizon = 1.0;
  std::size_t paths = 10000;
  std::uint64_t seed = 1;
  double x0 = 0.0;
  unsigned workers = 1;
};

struct AveragingStudy {
  std::vector<double> eps;
  std::vector<double> mean;
  std::vector<double> std_error;
  std::vector<std::size_t> steps;
  /// Log-log fit of |mean| against ε; unset when every estimate is exactly 0.
  std::optional<RateFit> fit;
};

/// Monte Carlo estimates of E∫₀ᵀ e^{-λs} F(X^ε_s) h(X^ε_s/ε) ds for the
/// fully periodic drift b across the ε grid. All ε share one Brownian path
/// per sample: each level's increments are sums of the finest increments.
AveragingStudy averaging_residual(const PeriodicDrift& drift,
                                  const std::function<double(double)>& F,
                                  const std::function<double(double)>& h,
                                  const AveragingOptions& opt);

}  // namespace ihom
