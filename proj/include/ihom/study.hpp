#pragma once

// Convergence study: runs every enabled check of an experiment, compares
// against thresholds and writes the CSV report.

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "ihom/analytic.hpp"
#include "ihom/config.hpp"
#include "ihom/homogenize.hpp"
#include "ihom/micro_sim.hpp"
#include "ihom/skew_bm.hpp"

namespace ihom {

/// KS statistic of X^ε(t) (started at 0) against the exact CDF of G(B_p(t)).
double ks_distance(const PathEnsemble& ensemble, const SkewParams& params, double t);

/// CSV file whose first line is `# config_hash=<hex>,seed=<n>`, followed by
/// the column header. Numbers are written with 17 significant digits.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::uint64_t config_hash, std::uint64_t seed,
            const std::vector<std::string>& columns);

  CsvWriter& cell(double v);
  CsvWriter& cell(std::uint64_t v);
  CsvWriter& cell(const std::string& v);
  void end_row();

 private:
  std::ofstream out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

std::string format_number(double v);

struct CheckResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct StudyPoint {
  double eps = 0.0;
  std::size_t paths = 0;
  Proportion sign;
  double ks = 0.0;
  double ks_critical = 0.0;
};

struct ResolventRow {
  double eps = 0.0;
  double delta = 0.0;
  double f0 = 0.0;
  double sup = 0.0;
  double min = 0.0;
  double ode_residual = 0.0;
  double matching_residual = 0.0;
  /// max_i |coef_i - lowest order_i| / δ
  double lowest_order_gap = 0.0;
};

struct ConvergenceReport {
  HomogenizedParams params;
  std::optional<ExitRateFit> exit;
  std::vector<ResolventRow> resolvent;
  std::optional<RateFit> resolvent_fit;
  std::optional<ResolventMC> resolvent_mc;
  double resolvent_mc_exact = 0.0;
  std::vector<StudyPoint> points;
  std::optional<Histogram> plateau_density;
  std::optional<PlateauRatio> plateau;
  std::optional<AveragingStudy> averaging;
  std::optional<MeanEstimate> harmonic;
  std::vector<CheckResult> checks;

  bool all_passed() const;
};

/// F(x) = exp(-(x - 1/2)²/(2·(1/2)²)), the weight in the averaging check.
double averaging_weight(double x);

ConvergenceReport run_convergence_study(const ExperimentConfig& cfg);

/// Writes params.csv, exit_prob.csv, resolvent.csv, resolvent_mc.csv,
/// convergence.csv, plateau.csv, averaging.csv, harmonic.csv and checks.csv
/// (only the files whose stage ran).
void write_report(const ConvergenceReport& report, const ExperimentConfig& cfg,
                  const std::filesystem::path& out_dir);

}  // namespace ihom
