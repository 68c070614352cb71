#include "ihom/study.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "ihom/errors.hpp"

namespace ihom {

double ks_distance(const PathEnsemble& ensemble, const SkewParams& params, double t) {
  return ks_statistic(ensemble.values_at(t),
                      [&](double y) { return limit_transition_cdf(params, t, 0.0, y); });
}

// ---------------------------------------------------------------------------
// CSV

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

CsvWriter::CsvWriter(const std::filesystem::path& path, std::uint64_t config_hash,
                     std::uint64_t seed, const std::vector<std::string>& columns)
    : out_(path, std::ios::binary), columns_(columns.size()) {
  if (!out_) throw ConfigError("cannot write " + path.string());
  out_ << "# config_hash=" << hex64(config_hash) << ",seed=" << seed << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

CsvWriter& CsvWriter::cell(const std::string& v) {
  if (filled_ == columns_) throw DomainError("too many cells in CSV row");
  out_ << (filled_++ ? "," : "") << v;
  return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_number(v)); }

CsvWriter& CsvWriter::cell(std::uint64_t v) { return cell(std::to_string(v)); }

void CsvWriter::end_row() {
  if (filled_ != columns_) throw DomainError("incomplete CSV row");
  out_ << '\n';
  filled_ = 0;
}

// ---------------------------------------------------------------------------
// Study

bool ConvergenceReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

double averaging_weight(double x) {
  const double d = x - 0.5;
  return std::exp(-d * d / 0.5);
}

namespace {

// Number of consecutive pairs that fail to decrease strictly.
double trend_violations(const std::vector<double>& xs) {
  double bad = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) bad += xs[i] < xs[i - 1] ? 0.0 : 1.0;
  return bad;
}

void run_exit(const ExperimentConfig& cfg, ConvergenceReport& rep) {
  const auto& t = cfg.thresholds;
  rep.exit = exit_rate_fit(cfg.spec, cfg.exit_x, cfg.exit_eps);
  const auto& e = *rep.exit;
  if (e.exact) {
    rep.checks.push_back({"exit_exact", std::abs(e.limit - e.target), 1e-12,
                          std::abs(e.limit - e.target) <= 1e-12});
    return;
  }
  rep.checks.push_back(
      {"exit_alpha", e.alpha, t.exit_alpha_tol, std::abs(e.alpha - t.exit_alpha) <= t.exit_alpha_tol});
  const double gap = std::abs(e.limit - e.target);
  rep.checks.push_back({"exit_limit", gap, t.exit_limit_tol, gap <= t.exit_limit_tol});
}

void run_resolvent(const ExperimentConfig& cfg, ConvergenceReport& rep) {
  const auto& t = cfg.thresholds;
  const double lambda = cfg.resolvent_lambda;
  const auto lowest = resolvent_lowest_order(lambda);
  double ode = 0.0;
  double matching = 0.0;
  double gap = 0.0;
  double min_f = INFINITY;
  std::vector<double> sups;
  for (double eps : cfg.resolvent_eps) {
    const double delta = std::sqrt(eps);
    const auto sol = resolvent_solve(eps, delta, lambda);
    ResolventRow row{eps, delta, sol(0.0), sol.sup_norm(), INFINITY, sol.ode_residual(),
                     sol.matching_residual(), 0.0};
    for (int i = 0; i < 5; ++i) {
      row.lowest_order_gap =
          std::max(row.lowest_order_gap, std::abs(sol.coefficients()[i] - lowest[i]) / delta);
    }
    constexpr int kSamples = 4000;
    const double span = delta + 20.0 / std::sqrt(2.0 * lambda);
    for (int k = 0; k <= kSamples; ++k) row.min = std::min(row.min, sol(span * k / kSamples));
    ode = std::max(ode, row.ode_residual);
    matching = std::max(matching, row.matching_residual);
    gap = std::max(gap, row.lowest_order_gap);
    min_f = std::min(min_f, row.min);
    sups.push_back(row.sup);
    rep.resolvent.push_back(row);
  }
  rep.checks.push_back({"resolvent_ode", ode, t.resolvent_ode_tol, ode <= t.resolvent_ode_tol});
  rep.checks.push_back({"resolvent_matching", matching, 1e-9, matching <= 1e-9});
  rep.checks.push_back({"resolvent_lowest_order", gap, t.resolvent_lowest_order_k,
                        gap <= t.resolvent_lowest_order_k});
  rep.checks.push_back({"resolvent_nonnegative", min_f, 0.0, min_f >= 0.0});
  if (sups.size() >= 3) {
    rep.resolvent_fit = fit_rate(cfg.resolvent_eps, sups);
    const double a = rep.resolvent_fit->slope;
    rep.checks.push_back({"resolvent_sup_rate", a, t.resolvent_alpha_tol,
                          std::abs(a - t.resolvent_alpha) <= t.resolvent_alpha_tol});
  }

  if (cfg.resolvent_mc_paths == 0) return;
  const double eps = cfg.resolvent_mc_eps;
  const double delta = std::sqrt(eps);
  rep.resolvent_mc = resolvent_mc_crosscheck(eps, delta, lambda, cfg.resolvent_mc_paths, cfg.seed,
                                             0.0, cfg.workers);
  rep.resolvent_mc_exact = resolvent_solve(eps, delta, lambda)(0.0);
  const double z =
      std::abs(rep.resolvent_mc->mean - rep.resolvent_mc_exact) / rep.resolvent_mc->std_error;
  rep.checks.push_back({"resolvent_mc", z, t.mc_sigmas, z <= t.mc_sigmas});
}

void run_study(const ExperimentConfig& cfg, ConvergenceReport& rep) {
  const auto& t = cfg.thresholds;
  const auto sp = skew_params(rep.params);
  if (!skew_density_gate(sp).passed()) throw DomainError("skew BM density failed its gate");
  const std::vector<double> times{cfg.horizon};
  std::vector<double> sign_err;
  std::vector<double> ks;
  for (double eps : cfg.eps_grid) {
    SimConfig sim;
    sim.eps = eps;
    sim.horizon = cfg.horizon;
    sim.paths = cfg.paths;
    sim.seed = cfg.seed;
    sim.workers = cfg.workers;
    const auto ens = simulate_micro(cfg.spec, sim, times);
    StudyPoint pt{eps, cfg.paths, sign_fraction(ens, cfg.horizon), 0.0,
                  ks_critical_value(cfg.paths)};
    pt.ks = ks_distance(ens, sp, cfg.horizon);
    sign_err.push_back(std::abs(pt.sign.value - rep.params.p));
    ks.push_back(pt.ks);
    rep.points.push_back(pt);
  }
  if (cfg.check_sign) {
    rep.checks.push_back({"sign_trend", trend_violations(sign_err), 0.0,
                          trend_violations(sign_err) == 0.0});
    const auto& last = rep.points.back();
    const double tol = std::max(t.sign_abs_tol, t.sign_sigmas * last.sign.std_error);
    rep.checks.push_back({"sign_final", sign_err.back(), tol, sign_err.back() <= tol});
  }
  if (cfg.check_ks) {
    rep.checks.push_back({"ks_trend", trend_violations(ks), 0.0, trend_violations(ks) == 0.0});
    rep.checks.push_back({"ks_final", ks.back(), t.ks_max, ks.back() <= t.ks_max});
  }
}

void run_plateau(const ExperimentConfig& cfg, ConvergenceReport& rep) {
  const double eps = cfg.plateau_eps;
  const double eta = cfg.spec.eta();
  constexpr int kSub = 4;
  const int periods = static_cast<int>(std::ceil((cfg.plateau_outer - eps * eta) / eps));
  HistogramSpec hs;
  hs.lo = -(eps * eta + periods * eps);
  hs.bins = static_cast<int>(std::lround(2.0 * (eta + periods) * kSub));
  hs.hi = hs.lo + hs.bins * (eps / kSub);

  SimConfig sim;
  sim.eps = eps;
  sim.horizon = cfg.plateau_horizon;
  sim.paths = cfg.plateau_paths;
  sim.seed = cfg.seed;
  sim.workers = cfg.workers;
  const std::vector<double> times{cfg.plateau_horizon};
  const auto ens = simulate_micro(cfg.spec, sim, times, hs);
  rep.plateau_density = *ens.occupation();
  const double inner = eps * (eta + cfg.plateau_inner_periods);
  const double outer = eps * (eta + periods);
  rep.plateau = occupation_plateau_ratio(empirical_density(ens, 1), skew_params(rep.params),
                                         cfg.plateau_horizon, inner, outer);
  const double target = rep.params.lambda_plus / rep.params.lambda_minus;
  const double rel = std::abs(rep.plateau->ratio - target) / target;
  rep.checks.push_back(
      {"plateau_ratio", rel, cfg.thresholds.plateau_rel_tol, rel <= cfg.thresholds.plateau_rel_tol});
}

void run_averaging(const ExperimentConfig& cfg, ConvergenceReport& rep) {
  AveragingOptions opt;
  opt.eps_grid = cfg.averaging_eps;
  opt.lambda = cfg.averaging_lambda;
  opt.horizon = cfg.averaging_horizon;
  opt.paths = cfg.averaging_paths;
  opt.seed = cfg.seed;
  opt.workers = cfg.workers;
  const auto& b = cfg.averaging_drift;
  rep.averaging = averaging_residual(b, averaging_weight, [&b](double u) { return b(u); }, opt);
  const auto& t = cfg.thresholds;
  if (rep.averaging->fit) {
    const double s = rep.averaging->fit->slope;
    rep.checks.push_back({"averaging_slope", s, t.averaging_slope_tol,
                          std::abs(s - t.averaging_slope) <= t.averaging_slope_tol});
  } else {
    rep.checks.push_back({"averaging_slope", 0.0, t.averaging_slope_tol, false});
  }
}

void run_harmonic(const ExperimentConfig& cfg, ConvergenceReport& rep) {
  SimConfig sim;
  sim.eps = cfg.harmonic_eps;
  sim.horizon = cfg.horizon;
  sim.paths = cfg.harmonic_paths;
  sim.seed = cfg.seed;
  sim.workers = cfg.workers;
  const std::vector<double> times{0.0, cfg.horizon};
  const auto ens = simulate_micro(cfg.spec, sim, times);
  rep.harmonic = harmonic_drift(ens, cfg.horizon);
  const double z = std::abs(rep.harmonic->mean) / rep.harmonic->std_error;
  rep.checks.push_back({"harmonic_drift", z, cfg.thresholds.mc_sigmas,
                        z <= cfg.thresholds.mc_sigmas});
}

}  // namespace

ConvergenceReport run_convergence_study(const ExperimentConfig& cfg) {
  ConvergenceReport rep;
  rep.params = homogenized_params(cfg.spec);
  if (cfg.check_exit) run_exit(cfg, rep);
  if (cfg.check_resolvent) run_resolvent(cfg, rep);
  if (cfg.check_sign || cfg.check_ks) run_study(cfg, rep);
  if (cfg.check_plateau) run_plateau(cfg, rep);
  if (cfg.check_averaging) run_averaging(cfg, rep);
  if (cfg.check_harmonic) run_harmonic(cfg, rep);
  return rep;
}

void write_report(const ConvergenceReport& rep, const ExperimentConfig& cfg,
                  const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto hash = cfg.config_hash;
  const auto seed = cfg.seed;
  {
    const auto& p = rep.params;
    CsvWriter w(out_dir / "params.csv", hash, seed,
                {"C_plus", "C_minus", "lambda_plus", "lambda_minus", "p", "p_plus", "p_minus"});
    w.cell(p.C_plus).cell(p.C_minus).cell(p.lambda_plus).cell(p.lambda_minus).cell(p.p);
    w.cell(p.p_plus).cell(p.p_minus).end_row();
  }
  if (rep.exit) {
    CsvWriter w(out_dir / "exit_prob.csv", hash, seed, {"eps", "delta", "value", "error_estimate"});
    for (std::size_t i = 0; i < rep.exit->eps.size(); ++i) {
      w.cell(rep.exit->eps[i]).cell(rep.exit->delta[i]).cell(rep.exit->probability[i]);
      w.cell(std::abs(rep.exit->probability[i] - rep.exit->target)).end_row();
    }
  }
  if (!rep.resolvent.empty()) {
    CsvWriter w(out_dir / "resolvent.csv", hash, seed,
                {"eps", "delta", "value", "error_estimate", "sup_f", "matching_residual",
                 "lowest_order_gap"});
    for (const auto& r : rep.resolvent) {
      w.cell(r.eps).cell(r.delta).cell(r.f0).cell(r.ode_residual).cell(r.sup);
      w.cell(r.matching_residual).cell(r.lowest_order_gap).end_row();
    }
  }
  if (rep.resolvent_mc) {
    CsvWriter w(out_dir / "resolvent_mc.csv", hash, seed,
                {"eps", "delta", "value", "error_estimate", "analytic", "steps"});
    const double eps = cfg.resolvent_mc_eps;
    w.cell(eps).cell(std::sqrt(eps)).cell(rep.resolvent_mc->mean).cell(rep.resolvent_mc->std_error);
    w.cell(rep.resolvent_mc_exact).cell(rep.resolvent_mc->steps).end_row();
  }
  if (!rep.points.empty()) {
    CsvWriter w(out_dir / "convergence.csv", hash, seed,
                {"eps", "paths", "sign_fraction", "sign_std_error", "p", "ks", "ks_critical"});
    for (const auto& pt : rep.points) {
      w.cell(pt.eps).cell(static_cast<std::uint64_t>(pt.paths)).cell(pt.sign.value);
      w.cell(pt.sign.std_error).cell(rep.params.p).cell(pt.ks).cell(pt.ks_critical).end_row();
    }
  }
  if (rep.plateau_density) {
    CsvWriter w(out_dir / "plateau.csv", hash, seed, {"bin_left", "bin_right", "mass"});
    const auto& h = *rep.plateau_density;
    for (int b = 0; b < h.spec.bins; ++b) {
      w.cell(h.bin_left(b)).cell(h.bin_right(b)).cell(h.mass[b]).end_row();
    }
  }
  if (rep.averaging) {
    CsvWriter w(out_dir / "averaging.csv", hash, seed, {"eps", "steps", "mean", "std_error"});
    const auto& a = *rep.averaging;
    for (std::size_t i = 0; i < a.eps.size(); ++i) {
      w.cell(a.eps[i]).cell(static_cast<std::uint64_t>(a.steps[i])).cell(a.mean[i]);
      w.cell(a.std_error[i]).end_row();
    }
  }
  if (rep.harmonic) {
    CsvWriter w(out_dir / "harmonic.csv", hash, seed, {"eps", "paths", "drift", "std_error"});
    w.cell(cfg.harmonic_eps).cell(static_cast<std::uint64_t>(cfg.harmonic_paths));
    w.cell(rep.harmonic->mean).cell(rep.harmonic->std_error).end_row();
  }
  CsvWriter w(out_dir / "checks.csv", hash, seed, {"check", "value", "threshold", "pass"});
  for (const auto& c : rep.checks) {
    w.cell(c.name).cell(c.value).cell(c.threshold).cell(std::string(c.pass ? "1" : "0")).end_row();
  }
}

}  // namespace ihom
