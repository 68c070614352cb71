#pragma once

// Text configuration: one `key = value` per line, `#` starts a comment.
// Values are numbers, true/false, "strings", arrays [a, b, ...] (may span
// lines) or inline tables {name = [..], ...}.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ihom/drift_model.hpp"

namespace ihom {

using InlineTable = std::map<std::string, std::vector<double>>;
using ConfigValue = std::variant<double, bool, std::string, std::vector<double>, InlineTable>;

class ConfigFile {
 public:
  /// Throws ConfigError with the line number on malformed input.
  static ConfigFile parse(std::string_view text, std::string origin = "<string>");
  static ConfigFile load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.contains(key); }
  const ConfigValue& at(const std::string& key) const;

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) const;
  std::uint64_t integer(const std::string& key,
                        std::optional<std::uint64_t> fallback = std::nullopt) const;
  bool flag(const std::string& key, std::optional<bool> fallback = std::nullopt) const;
  std::string string(const std::string& key,
                     std::optional<std::string> fallback = std::nullopt) const;
  std::vector<double> array(const std::string& key,
                            std::optional<std::vector<double>> fallback = std::nullopt) const;

  std::vector<std::string> keys() const;
  /// Throws ConfigError naming the first key not in `known`.
  void require_known(const std::vector<std::string>& known) const;

  const std::string& text() const { return text_; }
  const std::string& origin() const { return origin_; }

 private:
  std::map<std::string, ConfigValue> values_;
  std::map<std::string, std::string> raw_;
  std::string text_;
  std::string origin_;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t value);

/// Builds a drift from the keys eta, interface, left.sin, left.cos,
/// right.sin, right.cos (Fourier modes k = 1, 2, ...). `prefix` is prepended
/// to every key.
DriftSpec drift_from_config(const ConfigFile& file, const std::string& prefix = "");
std::vector<std::string> drift_keys(const std::string& prefix = "");

DriftSpec load_drift(const std::filesystem::path& path);

struct Thresholds {
  double exit_alpha = 0.5;
  double exit_alpha_tol = 0.1;
  double exit_limit_tol = 1e-3;
  double resolvent_alpha = 0.5;
  double resolvent_alpha_tol = 0.1;
  double resolvent_ode_tol = 1e-8;
  double resolvent_lowest_order_k = 2.0;
  double mc_sigmas = 3.0;
  double sign_abs_tol = 0.02;
  double sign_sigmas = 3.0;
  double ks_max = 0.05;
  double plateau_rel_tol = 0.1;
  double averaging_slope = 1.0;
  double averaging_slope_tol = 0.3;
};

struct ExperimentConfig {
  DriftSpec spec = DriftSpec::zero_drift();
  std::string source;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 1;
  unsigned workers = 1;

  // sign fraction and KS study
  std::vector<double> eps_grid{0.2, 0.1, 0.05};
  double horizon = 1.0;
  std::size_t paths = 20000;

  std::vector<double> exit_eps{1e-2, 1e-3, 1e-4, 1e-5};
  double exit_x = 0.0;  // start point in units of ε

  std::vector<double> resolvent_eps{1e-2, 1e-3, 1e-4};
  double resolvent_lambda = 1.0;
  double resolvent_mc_eps = 0.05;
  std::size_t resolvent_mc_paths = 10000;  // 0 skips the Monte Carlo cross-check

  double plateau_eps = 0.05;
  double plateau_horizon = 5.0;
  std::size_t plateau_paths = 2000;
  int plateau_inner_periods = 2;
  double plateau_outer = 1.0;

  PeriodicDrift averaging_drift;
  std::vector<double> averaging_eps{0.2, 0.1, 0.05, 0.025};
  std::size_t averaging_paths = 10000;
  double averaging_lambda = 1.0;
  double averaging_horizon = 1.0;

  double harmonic_eps = 0.1;
  std::size_t harmonic_paths = 10000;

  bool check_exit = true;
  bool check_resolvent = true;
  bool check_sign = true;
  bool check_ks = true;
  bool check_plateau = true;
  bool check_averaging = true;
  bool check_harmonic = true;

  Thresholds thresholds;
};

/// Reads an experiment file. The drift is given inline or through
/// `drift = "path"` (relative to the experiment file). The hash covers the
/// bytes of every file read.
ExperimentConfig load_experiment(const std::filesystem::path& path);
ExperimentConfig experiment_from_config(const ConfigFile& file,
                                        const std::filesystem::path& base_dir = ".");

}  // namespace ihom
