#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ihom/config.hpp"
#include "ihom/errors.hpp"
#include "ihom/homogenize.hpp"
#include "ihom/micro_sim.hpp"
#include "ihom/rng.hpp"
#include "ihom/skew_bm.hpp"
#include "ihom/study.hpp"

namespace fs = std::filesystem;
using namespace ihom;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<unsigned> workers;
};

void add_common(CLI::App* cmd, Common& c, bool config_required = true) {
  auto* opt = cmd->add_option("--config", c.config, "experiment or drift config file");
  if (config_required) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "master seed (overrides the config)");
  cmd->add_option("--out", c.out, "output directory for CSV files");
  cmd->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
}

ExperimentConfig load(const Common& c) {
  ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : load_experiment(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.workers) cfg.workers = *c.workers;
  return cfg;
}

void only(ExperimentConfig& cfg, bool exit, bool resolvent) {
  cfg.check_exit = exit;
  cfg.check_resolvent = resolvent;
  cfg.check_sign = cfg.check_ks = cfg.check_plateau = false;
  cfg.check_averaging = cfg.check_harmonic = false;
}

int report_checks(const ConvergenceReport& rep) {
  for (const auto& c : rep.checks) {
    fmt::print("{} {:<24} value={:.6g} threshold={:.6g}\n", c.pass ? "PASS" : "FAIL", c.name,
               c.value, c.threshold);
  }
  return rep.all_passed() ? 0 : 1;
}

int cmd_params(const Common& c) {
  const auto cfg = load(c);
  const auto p = homogenized_params(cfg.spec);
  fmt::print("C_plus,C_minus,lambda_plus,lambda_minus,p,p_plus,p_minus\n");
  fmt::print("{},{},{},{},{},{},{}\n", format_number(p.C_plus), format_number(p.C_minus),
             format_number(p.lambda_plus), format_number(p.lambda_minus), format_number(p.p),
             format_number(p.p_plus), format_number(p.p_minus));
  fmt::print("\n");
  fmt::print("effective coefficient right  C+ = {:.10f}  (C+^2 = {:.10f})\n", p.C_plus,
             p.C_plus * p.C_plus);
  fmt::print("effective coefficient left   C- = {:.10f}  (C-^2 = {:.10f})\n", p.C_minus,
             p.C_minus * p.C_minus);
  fmt::print("interface weights  lambda+ = {:.10f}  lambda- = {:.10f}\n", p.lambda_plus,
             p.lambda_minus);
  fmt::print("skewness           p = {:.10f}\n", p.p);
  fmt::print("exit weights       p+ = {:.10f}  p- = {:.10f}\n", p.p_plus, p.p_minus);
  if (!c.out.empty()) {
    fs::create_directories(c.out);
    CsvWriter w(fs::path(c.out) / "params.csv", cfg.config_hash, cfg.seed,
                {"C_plus", "C_minus", "lambda_plus", "lambda_minus", "p", "p_plus", "p_minus"});
    w.cell(p.C_plus).cell(p.C_minus).cell(p.lambda_plus).cell(p.lambda_minus).cell(p.p);
    w.cell(p.p_plus).cell(p.p_minus).end_row();
  }
  return 0;
}

struct SimulateArgs {
  double eps = 0.1;
  double horizon = 1.0;
  std::size_t paths = 1000;
  double dt = 0.0;
  double x0 = 0.0;
  std::vector<double> times;
  int bins = 0;
  double lo = -2.0;
  double hi = 2.0;
  bool compensate = false;
};

int cmd_simulate(const Common& c, const SimulateArgs& a) {
  const auto cfg = load(c);
  SimConfig sim;
  sim.eps = a.eps;
  sim.horizon = a.horizon;
  sim.paths = a.paths;
  sim.dt = a.dt;
  sim.x0 = a.x0;
  sim.seed = cfg.seed;
  sim.workers = cfg.workers;
  std::vector<double> times = a.times.empty() ? std::vector<double>{a.horizon} : a.times;
  std::optional<HistogramSpec> hs;
  if (a.bins > 0) hs = HistogramSpec{a.lo, a.hi, a.bins};
  auto ens = simulate_micro(cfg.spec, sim, times, hs);
  if (a.compensate) ens = compensated(ens, Compensator(cfg.spec));

  const auto sp = skew_params(homogenized_params(cfg.spec));
  const auto frac = sign_fraction(ens, times.back());
  fmt::print("eps={} dt={} steps={} paths={}\n", a.eps, ens.dt(), ens.steps(), ens.size());
  fmt::print("fraction positive at t={}: {:.6f} +- {:.6f} (p = {:.6f})\n", times.back(),
             frac.value, frac.std_error, sp.p);
  if (a.x0 == 0.0 && !a.compensate) {
    fmt::print("KS distance to the limit law: {:.6f} (1% critical value {:.6f})\n",
               ks_distance(ens, sp, times.back()), ks_critical_value(ens.size()));
  }
  if (!c.out.empty()) {
    fs::create_directories(c.out);
    CsvWriter w(fs::path(c.out) / "paths.csv", cfg.config_hash, cfg.seed,
                {"path_id", "t", "value"});
    for (std::size_t i = 0; i < ens.size(); ++i) {
      const auto path = ens.path(i);
      for (std::size_t k = 0; k < times.size(); ++k) {
        w.cell(static_cast<std::uint64_t>(i)).cell(times[k]).cell(path[k]).end_row();
      }
    }
    if (ens.occupation()) {
      CsvWriter h(fs::path(c.out) / "histogram.csv", cfg.config_hash, cfg.seed,
                  {"bin_left", "bin_right", "mass"});
      const auto& hist = *ens.occupation();
      for (int b = 0; b < hist.spec.bins; ++b) {
        h.cell(hist.bin_left(b)).cell(hist.bin_right(b)).cell(hist.mass[b]).end_row();
      }
    }
  }
  return 0;
}

int cmd_limit_sample(const Common& c, std::size_t paths, double horizon, int steps, double x0) {
  const auto cfg = load(c);
  const auto sp = skew_params(homogenized_params(cfg.spec));
  std::vector<double> grid(steps + 1);
  for (int k = 0; k <= steps; ++k) grid[k] = horizon * k / steps;
  std::vector<PathSample> samples(paths);
  for (std::size_t i = 0; i < paths; ++i) {
    RandomStream rng(cfg.seed, StreamTag::limit_paths, static_cast<std::uint32_t>(i));
    samples[i] = sample_limit_path(sp, grid, x0, rng);
  }
  std::size_t positive = 0;
  for (const auto& s : samples) positive += s.values.back() > 0.0 ? 1 : 0;
  fmt::print("limit paths={} p={:.6f} fraction positive at t={}: {:.6f}\n", paths, sp.p, horizon,
             static_cast<double>(positive) / static_cast<double>(paths));
  if (!c.out.empty()) {
    fs::create_directories(c.out);
    CsvWriter w(fs::path(c.out) / "limit_paths.csv", cfg.config_hash, cfg.seed,
                {"path_id", "t", "value"});
    for (std::size_t i = 0; i < paths; ++i) {
      for (std::size_t k = 0; k < grid.size(); ++k) {
        w.cell(static_cast<std::uint64_t>(i)).cell(grid[k]).cell(samples[i].values[k]).end_row();
      }
    }
  }
  return 0;
}

int run_report(const Common& c, const ExperimentConfig& cfg) {
  const auto rep = run_convergence_study(cfg);
  if (!c.out.empty()) write_report(rep, cfg, c.out);
  return report_checks(rep);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Homogenized interface diffusion: parameters, simulation and convergence checks"};
  app.require_subcommand(1);

  Common common;

  auto* params = app.add_subcommand("params", "print the homogenized parameters");
  add_common(params, common);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "simulate the rescaled microscopic diffusion");
  add_common(simulate, common);
  simulate->add_option("--eps", sim.eps, "scale parameter")->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--horizon", sim.horizon, "final time");
  simulate->add_option("--paths", sim.paths, "number of paths");
  simulate->add_option("--dt", sim.dt, "time step (0 = largest admissible)");
  simulate->add_option("--x0", sim.x0, "start point");
  simulate->add_option("--times", sim.times, "output times (default: horizon)");
  simulate->add_option("--bins", sim.bins, "occupation histogram bins (0 = none)");
  simulate->add_option("--lo", sim.lo, "histogram lower edge");
  simulate->add_option("--hi", sim.hi, "histogram upper edge");
  simulate->add_flag("--compensated", sim.compensate, "record Y = X + eps g(X/eps)");

  std::size_t limit_paths = 1000;
  double limit_horizon = 1.0;
  int limit_steps = 100;
  double limit_x0 = 0.0;
  auto* limit = app.add_subcommand("limit-sample", "sample paths of the limit process");
  add_common(limit, common);
  limit->add_option("--paths", limit_paths, "number of paths");
  limit->add_option("--horizon", limit_horizon, "final time");
  limit->add_option("--steps", limit_steps, "grid steps")->check(CLI::PositiveNumber);
  limit->add_option("--x0", limit_x0, "start point");

  std::vector<double> exit_eps;
  std::optional<double> exit_x;
  auto* exitp = app.add_subcommand("exit-prob", "exit probabilities through +-sqrt(eps)");
  add_common(exitp, common);
  exitp->add_option("--eps", exit_eps, "eps grid (descending)");
  exitp->add_option("--x", exit_x, "start point in units of eps");

  std::vector<double> res_eps;
  double res_lambda = 1.0;
  std::optional<double> res_mc_eps;
  std::optional<std::size_t> res_mc_paths;
  auto* resolvent = app.add_subcommand("resolvent", "discounted occupation of (-delta, delta)");
  add_common(resolvent, common, false);
  resolvent->add_option("--eps", res_eps, "eps grid (descending)");
  resolvent->add_option("--lambda", res_lambda, "resolvent parameter")->check(CLI::PositiveNumber);
  resolvent->add_option("--mc-eps", res_mc_eps, "eps of the Monte Carlo cross-check");
  resolvent->add_option("--mc-paths", res_mc_paths, "paths of the Monte Carlo cross-check");

  auto* converge = app.add_subcommand("converge", "run every enabled convergence check");
  add_common(converge, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (params->parsed()) return cmd_params(common);
    if (simulate->parsed()) return cmd_simulate(common, sim);
    if (limit->parsed()) {
      return cmd_limit_sample(common, limit_paths, limit_horizon, limit_steps, limit_x0);
    }
    if (exitp->parsed()) {
      auto cfg = load(common);
      only(cfg, true, false);
      if (!exit_eps.empty()) cfg.exit_eps = exit_eps;
      if (exit_x) cfg.exit_x = *exit_x;
      return run_report(common, cfg);
    }
    if (resolvent->parsed()) {
      auto cfg = load(common);
      only(cfg, false, true);
      if (!res_eps.empty()) cfg.resolvent_eps = res_eps;
      cfg.resolvent_lambda = res_lambda;
      if (res_mc_eps) cfg.resolvent_mc_eps = *res_mc_eps;
      if (res_mc_paths) cfg.resolvent_mc_paths = *res_mc_paths;
      return run_report(common, cfg);
    }
    if (converge->parsed()) return run_report(common, load(common));
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
