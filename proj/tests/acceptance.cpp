#include <CLI11.hpp>
#include <fmt/core.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ihom/config.hpp"
#include "ihom/errors.hpp"
#include "ihom/homogenize.hpp"
#include "ihom/skew_bm.hpp"
#include "ihom/study.hpp"
#include "test_helpers.hpp"

using namespace ihom;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string describe(const CheckResult& c) {
  return fmt::format("{}={:.6g} (limit {:.3g})", c.name, c.value, c.threshold);
}

// Runs the study with only the named stage enabled and collects the checks
// whose names are listed.
Outcome study_stage(ExperimentConfig cfg, const std::string& stage,
                    const std::vector<std::string>& names) {
  cfg.check_exit = stage == "exit";
  cfg.check_resolvent = stage == "resolvent";
  cfg.check_sign = stage == "study";
  cfg.check_ks = stage == "study";
  cfg.check_plateau = stage == "plateau";
  cfg.check_averaging = stage == "averaging";
  cfg.check_harmonic = stage == "harmonic";
  const auto rep = run_convergence_study(cfg);
  Outcome out{true, {}};
  std::size_t found = 0;
  for (const auto& c : rep.checks) {
    if (std::find(names.begin(), names.end(), c.name) == names.end()) continue;
    ++found;
    out.pass = out.pass && c.pass;
    if (!out.detail.empty()) out.detail += ", ";
    out.detail += describe(c);
  }
  if (found != names.size()) {
    out.pass = false;
    out.detail += " (missing checks)";
  }
  return out;
}

Outcome two_route_coefficients() {
  std::mt19937_64 gen(2024);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto drift = testing::random_drift(gen);
    const double cell = effective_coefficient_cell(Corrector(drift, Side::right));
    const double product = effective_coefficient_product(drift);
    worst = std::max(worst, std::abs(cell - product) / product);
  }
  return {worst <= 1e-10, fmt::format("max relative gap {:.3g} (limit 1e-10)", worst)};
}

Outcome bessel_benchmark() {
  const double c2 = effective_coefficient_product(PeriodicDrift::sine(1.0));
  const double i0 = std::cyl_bessel_i(0.0, 2.0);
  const double gap = std::abs(c2 - 1.0 / (i0 * i0));
  return {gap <= 1e-8, fmt::format("C^2={:.10f} gap {:.3g} (limit 1e-8)", c2, gap)};
}

Outcome density_gate(const ExperimentConfig& cfg) {
  const auto sp = skew_params(homogenized_params(cfg.spec));
  const auto g = skew_density_gate(sp);
  return {g.passed(), fmt::format("normalization {:.3g}, Chapman-Kolmogorov {:.3g}, flux {:.3g}, "
                                  "jump {:.3g}",
                                  g.normalization, g.chapman_kolmogorov, g.flux, g.jump)};
}

std::map<std::string, std::string> read_dir(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::ifstream in(entry.path(), std::ios::binary);
    files[entry.path().filename().string()] =
        std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return files;
}

Outcome determinism(const fs::path& cli, const fs::path& config, const fs::path& work) {
  std::vector<std::map<std::string, std::string>> runs;
  for (unsigned workers : {1u, 2u, 1u}) {
    const auto out = work / fmt::format("run{}", runs.size());
    fs::remove_all(out);
    const auto cmd = fmt::format("\"{}\" converge --config \"{}\" --out \"{}\" --workers {} > \"{}\"",
                                 cli.string(), config.string(), out.string(), workers,
                                 (work / fmt::format("run{}.log", runs.size())).string());
    const int status = std::system(cmd.c_str());
    if (status != 0) return {false, fmt::format("converge exited with status {}", status)};
    runs.push_back(read_dir(out));
  }
  if (runs[0].empty()) return {false, "no CSV files written"};
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r] != runs[0]) return {false, fmt::format("run {} differs from run 0", r)};
  }
  return {true, fmt::format("{} CSV files identical across 3 runs (workers 1, 2, 1)",
                            runs[0].size())};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  fs::path config;
  fs::path smoke;
  fs::path cli;
  fs::path work = fs::temp_directory_path() / "ihom_acceptance";
  std::vector<int> only;
  unsigned workers = 1;
  app.add_option("--config", config, "experiment config")->required()->check(CLI::ExistingFile);
  app.add_option("--smoke", smoke, "small config for the determinism run")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--cli", cli, "path to the ihom executable")->required()->check(CLI::ExistingFile);
  app.add_option("--work", work, "scratch directory");
  app.add_option("--only", only, "criteria to run (default: all)");
  app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  fs::create_directories(work);
  auto cfg = load_experiment(config);
  cfg.workers = workers;

  struct Criterion {
    std::string name;
    double seconds;  // runtime limit, 0 for none
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"two-route coefficients", 1, two_route_coefficients},
      {"Bessel benchmark", 1, bessel_benchmark},
      {"exit-probability rate", 10,
       [&] { return study_stage(cfg, "exit", {"exit_alpha", "exit_limit"}); }},
      {"resolvent bound", 1,
       [&] {
         auto c = cfg;
         c.resolvent_mc_paths = 0;
         return study_stage(c, "resolvent",
                            {"resolvent_ode", "resolvent_lowest_order", "resolvent_sup_rate"});
       }},
      {"resolvent MC cross-check", 60,
       [&] { return study_stage(cfg, "resolvent", {"resolvent_mc"}); }},
      {"sign-fraction convergence", 900,
       [&] { return study_stage(cfg, "study", {"sign_trend", "sign_final"}); }},
      {"KS convergence", 900,
       [&] {
         auto c = cfg;
         c.paths = 10000;
         return study_stage(c, "study", {"ks_trend", "ks_final"});
       }},
      {"occupation plateau ratio", 900, [&] { return study_stage(cfg, "plateau", {"plateau_ratio"}); }},
      {"averaging rate", 600, [&] { return study_stage(cfg, "averaging", {"averaging_slope"}); }},
      {"skew density gate", 5, [&] { return density_gate(cfg); }},
      {"harmonic-coordinate martingale", 300,
       [&] { return study_stage(cfg, "harmonic", {"harmonic_drift"}); }},
      {"determinism", 0, [&] { return determinism(cli, smoke, work); }},
  };

  const std::set<int> selected(only.begin(), only.end());
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.contains(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    const auto& c = criteria[i];
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
    if (c.seconds > 0.0 && took.count() > c.seconds) {
      out.pass = false;
      out.detail += fmt::format(", runtime over the {:g} s limit", c.seconds);
    }
    fmt::print("{} {:2d} {}: {} [{:.1f} s]\n", out.pass ? "PASS" : "FAIL", id, c.name, out.detail,
               took.count());
    std::fflush(stdout);
    failed += out.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
