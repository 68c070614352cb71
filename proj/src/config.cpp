#include "ihom/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "ihom/errors.hpp"

namespace ihom {
namespace {

class ValueParser {
 public:
  ValueParser(std::string_view text, std::string where) : s_(text), where_(std::move(where)) {}

  ConfigValue value() {
    skip();
    if (done()) fail("missing value");
    ConfigValue out;
    const char c = s_[pos_];
    if (c == '"') {
      out = string();
    } else if (c == '[') {
      out = array();
    } else if (c == '{') {
      out = table();
    } else if (s_.substr(pos_, 4) == "true") {
      pos_ += 4;
      out = true;
    } else if (s_.substr(pos_, 5) == "false") {
      pos_ += 5;
      out = false;
    } else {
      out = number();
    }
    skip();
    if (!done()) fail("unexpected trailing text");
    return out;
  }

 private:
  bool done() const { return pos_ >= s_.size(); }

  void skip() {
    while (!done() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip();
    if (done() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(where_ + ": " + what);
  }

  std::string string() {
    expect('"');
    const auto end = s_.find('"', pos_);
    if (end == std::string_view::npos) fail("unterminated string");
    std::string out(s_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return out;
  }

  double number() {
    skip();
    double v = 0.0;
    const char* first = s_.data() + pos_;
    const char* last = s_.data() + s_.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc()) fail("expected a number");
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return v;
  }

  std::vector<double> array() {
    expect('[');
    std::vector<double> out;
    skip();
    while (!done() && s_[pos_] != ']') {
      out.push_back(number());
      skip();
      if (!done() && s_[pos_] == ',') {
        ++pos_;
        skip();
      } else {
        break;
      }
    }
    expect(']');
    return out;
  }

  InlineTable table() {
    expect('{');
    InlineTable out;
    skip();
    while (!done() && s_[pos_] != '}') {
      const auto start = pos_;
      while (!done() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
        ++pos_;
      }
      const std::string name(s_.substr(start, pos_ - start));
      if (name.empty()) fail("expected a name in inline table");
      expect('=');
      skip();
      out[name] = array();
      skip();
      if (!done() && s_[pos_] == ',') {
        ++pos_;
        skip();
      } else {
        break;
      }
    }
    expect('}');
    return out;
  }

  std::string_view s_;
  std::string where_;
  std::size_t pos_ = 0;
};

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(a, b - a + 1));
}

int nesting(const std::string& s) {
  int depth = 0;
  bool quoted = false;
  for (char c : s) {
    if (c == '"') quoted = !quoted;
    if (quoted) continue;
    if (c == '[' || c == '{') ++depth;
    if (c == ']' || c == '}') --depth;
  }
  return depth;
}

const char* type_name(const ConfigValue& v) {
  switch (v.index()) {
    case 0:
      return "number";
    case 1:
      return "boolean";
    case 2:
      return "string";
    case 3:
      return "array";
    default:
      return "table";
  }
}

template <class T>
const T& typed(const ConfigFile& file, const std::string& key, const char* want) {
  const auto& v = file.at(key);
  if (const auto* p = std::get_if<T>(&v)) return *p;
  throw ConfigError(file.origin() + ": key '" + key + "' must be a " + want + ", got " +
                    type_name(v));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ConfigFile ConfigFile::parse(std::string_view text, std::string origin) {
  ConfigFile out;
  out.text_ = std::string(text);
  out.origin_ = std::move(origin);
  std::istringstream in(out.text_);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const int first_line = line_no;
    std::string stmt = strip_comment(line);
    while (nesting(stmt) > 0 && std::getline(in, line)) {
      ++line_no;
      stmt += ' ' + strip_comment(line);
    }
    stmt = trim(stmt);
    if (stmt.empty()) continue;
    const std::string where = out.origin_ + ":" + std::to_string(first_line);
    const auto eq = stmt.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(std::string_view(stmt).substr(0, eq));
    const bool valid_key =
        !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
          return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
        });
    if (!valid_key) throw ConfigError(where + ": invalid key '" + key + "'");
    if (out.values_.contains(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    const std::string raw = trim(std::string_view(stmt).substr(eq + 1));
    out.values_[key] = ValueParser(raw, where).value();
    out.raw_[key] = raw;
  }
  return out;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  return parse(read_file(path), path.string());
}

const ConfigValue& ConfigFile::at(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(origin_ + ": missing key '" + key + "'");
  return it->second;
}

double ConfigFile::number(const std::string& key, std::optional<double> fallback) const {
  if (!has(key) && fallback) return *fallback;
  return typed<double>(*this, key, "number");
}

std::uint64_t ConfigFile::integer(const std::string& key,
                                  std::optional<std::uint64_t> fallback) const {
  if (!has(key) && fallback) return *fallback;
  typed<double>(*this, key, "number");
  const std::string& raw = raw_.at(key);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  if (ec != std::errc() || ptr != raw.data() + raw.size()) {
    throw ConfigError(origin_ + ": key '" + key + "' must be a non-negative integer");
  }
  return v;
}

bool ConfigFile::flag(const std::string& key, std::optional<bool> fallback) const {
  if (!has(key) && fallback) return *fallback;
  return typed<bool>(*this, key, "boolean");
}

std::string ConfigFile::string(const std::string& key, std::optional<std::string> fallback) const {
  if (!has(key) && fallback) return *fallback;
  return typed<std::string>(*this, key, "string");
}

std::vector<double> ConfigFile::array(const std::string& key,
                                      std::optional<std::vector<double>> fallback) const {
  if (!has(key) && fallback) return *fallback;
  return typed<std::vector<double>>(*this, key, "array");
}

std::vector<std::string> ConfigFile::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) out.push_back(k);
  return out;
}

void ConfigFile::require_known(const std::vector<std::string>& known) const {
  for (const auto& [k, v] : values_) {
    if (std::find(known.begin(), known.end(), k) == known.end()) {
      throw ConfigError(origin_ + ": unknown key '" + k + "'");
    }
  }
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, value >>= 4) out[i] = digits[value & 0xF];
  return out;
}

// ---------------------------------------------------------------------------
// Drift

std::vector<std::string> drift_keys(const std::string& prefix) {
  return {prefix + "eta",       prefix + "interface", prefix + "left.sin",
          prefix + "left.cos",  prefix + "right.sin", prefix + "right.cos"};
}

DriftSpec drift_from_config(const ConfigFile& file, const std::string& prefix) {
  for (const char* side : {"left", "right"}) {
    for (const char* name : {"const", "cos0", "mean"}) {
      const auto key = prefix + side + "." + name;
      if (file.has(key)) {
        throw ConfigError(file.origin() + ": '" + key +
                          "' is not allowed; the periodic drift must have zero mean");
      }
    }
  }
  auto side = [&](const std::string& name) {
    return PeriodicDrift(file.array(prefix + name + ".sin", std::vector<double>{}),
                         file.array(prefix + name + ".cos", std::vector<double>{}));
  };
  const double eta = file.number(prefix + "eta", 0.5);
  if (!(eta > 0.0)) throw ConfigError(file.origin() + ": eta must be positive");

  InterfaceKind kind = InterfaceKind::zero;
  std::vector<double> poly;
  const auto key = prefix + "interface";
  if (file.has(key)) {
    const auto& v = file.at(key);
    if (const auto* s = std::get_if<std::string>(&v)) {
      if (*s == "zero") {
        kind = InterfaceKind::zero;
      } else if (*s == "blend") {
        kind = InterfaceKind::blend;
      } else {
        throw ConfigError(file.origin() + ": unknown interface kind '" + *s + "'");
      }
    } else if (const auto* t = std::get_if<InlineTable>(&v)) {
      if (t->size() != 1 || !t->contains("poly")) {
        throw ConfigError(file.origin() + ": interface table must be {poly = [...]}");
      }
      kind = InterfaceKind::polynomial;
      poly = t->at("poly");
    } else {
      throw ConfigError(file.origin() + ": interface must be \"zero\", \"blend\" or {poly = [...]}");
    }
  }
  return DriftSpec(side("left"), side("right"), eta, kind, poly);
}

DriftSpec load_drift(const std::filesystem::path& path) {
  const auto file = ConfigFile::load(path);
  file.require_known(drift_keys());
  return drift_from_config(file);
}

// ---------------------------------------------------------------------------
// Experiment

namespace {

std::vector<std::string> experiment_keys() {
  auto keys = drift_keys();
  const std::vector<std::string> extra{
      "drift",
      "seed",
      "workers",
      "study.eps",
      "study.horizon",
      "study.paths",
      "exit.eps",
      "exit.x",
      "resolvent.eps",
      "resolvent.lambda",
      "resolvent.mc_eps",
      "resolvent.mc_paths",
      "plateau.eps",
      "plateau.horizon",
      "plateau.paths",
      "plateau.inner_periods",
      "plateau.outer",
      "averaging.sin",
      "averaging.cos",
      "averaging.eps",
      "averaging.paths",
      "averaging.lambda",
      "averaging.horizon",
      "harmonic.eps",
      "harmonic.paths",
      "checks.exit",
      "checks.resolvent",
      "checks.sign",
      "checks.ks",
      "checks.plateau",
      "checks.averaging",
      "checks.harmonic",
      "thresholds.exit_alpha",
      "thresholds.exit_alpha_tol",
      "thresholds.exit_limit_tol",
      "thresholds.resolvent_alpha",
      "thresholds.resolvent_alpha_tol",
      "thresholds.resolvent_ode_tol",
      "thresholds.resolvent_lowest_order_k",
      "thresholds.mc_sigmas",
      "thresholds.sign_abs_tol",
      "thresholds.sign_sigmas",
      "thresholds.ks_max",
      "thresholds.plateau_rel_tol",
      "thresholds.averaging_slope",
      "thresholds.averaging_slope_tol",
  };
  keys.insert(keys.end(), extra.begin(), extra.end());
  return keys;
}

void check_eps_grid(const std::vector<double>& grid, const std::string& name, bool descending) {
  if (grid.empty()) throw ConfigError(name + " must not be empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0 && grid[i] <= 1.0)) throw ConfigError(name + " values must lie in (0, 1]");
    if (descending && i > 0 && !(grid[i] < grid[i - 1])) {
      throw ConfigError(name + " must be sorted in descending order");
    }
  }
}

std::size_t count(const ConfigFile& f, const std::string& key, std::size_t fallback) {
  const auto v = f.integer(key, fallback);
  if (v == 0) throw ConfigError(f.origin() + ": '" + key + "' must be positive");
  return static_cast<std::size_t>(v);
}

}  // namespace

ExperimentConfig experiment_from_config(const ConfigFile& file,
                                        const std::filesystem::path& base_dir) {
  file.require_known(experiment_keys());
  ExperimentConfig cfg;
  std::string hashed = file.text();
  cfg.source = file.origin();

  if (file.has("drift")) {
    for (const auto& k : drift_keys()) {
      if (file.has(k)) throw ConfigError(file.origin() + ": '" + k + "' given together with drift");
    }
    const auto path = base_dir / file.string("drift");
    const auto drift_file = ConfigFile::load(path);
    drift_file.require_known(drift_keys());
    cfg.spec = drift_from_config(drift_file);
    hashed += drift_file.text();
  } else {
    cfg.spec = drift_from_config(file);
  }
  cfg.config_hash = fnv1a(hashed);

  cfg.seed = file.integer("seed", cfg.seed);
  cfg.workers = static_cast<unsigned>(count(file, "workers", cfg.workers));

  cfg.eps_grid = file.array("study.eps", cfg.eps_grid);
  check_eps_grid(cfg.eps_grid, "study.eps", true);
  cfg.horizon = file.number("study.horizon", cfg.horizon);
  cfg.paths = count(file, "study.paths", cfg.paths);

  cfg.exit_eps = file.array("exit.eps", cfg.exit_eps);
  check_eps_grid(cfg.exit_eps, "exit.eps", true);
  cfg.exit_x = file.number("exit.x", cfg.exit_x);

  cfg.resolvent_eps = file.array("resolvent.eps", cfg.resolvent_eps);
  check_eps_grid(cfg.resolvent_eps, "resolvent.eps", true);
  cfg.resolvent_lambda = file.number("resolvent.lambda", cfg.resolvent_lambda);
  cfg.resolvent_mc_eps = file.number("resolvent.mc_eps", cfg.resolvent_mc_eps);
  cfg.resolvent_mc_paths = count(file, "resolvent.mc_paths", cfg.resolvent_mc_paths);

  cfg.plateau_eps = file.number("plateau.eps", cfg.plateau_eps);
  cfg.plateau_horizon = file.number("plateau.horizon", cfg.plateau_horizon);
  cfg.plateau_paths = count(file, "plateau.paths", cfg.plateau_paths);
  cfg.plateau_inner_periods =
      static_cast<int>(file.integer("plateau.inner_periods", cfg.plateau_inner_periods));
  cfg.plateau_outer = file.number("plateau.outer", cfg.plateau_outer);

  cfg.averaging_drift = file.has("averaging.sin") || file.has("averaging.cos")
                            ? PeriodicDrift(file.array("averaging.sin", std::vector<double>{}),
                                            file.array("averaging.cos", std::vector<double>{}))
                            : cfg.spec.right();
  cfg.averaging_eps = file.array("averaging.eps", cfg.averaging_eps);
  check_eps_grid(cfg.averaging_eps, "averaging.eps", true);
  cfg.averaging_paths = count(file, "averaging.paths", cfg.averaging_paths);
  cfg.averaging_lambda = file.number("averaging.lambda", cfg.averaging_lambda);
  cfg.averaging_horizon = file.number("averaging.horizon", cfg.averaging_horizon);

  cfg.harmonic_eps = file.number("harmonic.eps", cfg.harmonic_eps);
  cfg.harmonic_paths = count(file, "harmonic.paths", cfg.harmonic_paths);

  cfg.check_exit = file.flag("checks.exit", cfg.check_exit);
  cfg.check_resolvent = file.flag("checks.resolvent", cfg.check_resolvent);
  cfg.check_sign = file.flag("checks.sign", cfg.check_sign);
  cfg.check_ks = file.flag("checks.ks", cfg.check_ks);
  cfg.check_plateau = file.flag("checks.plateau", cfg.check_plateau);
  cfg.check_averaging = file.flag("checks.averaging", cfg.check_averaging);
  cfg.check_harmonic = file.flag("checks.harmonic", cfg.check_harmonic);

  auto& t = cfg.thresholds;
  t.exit_alpha = file.number("thresholds.exit_alpha", t.exit_alpha);
  t.exit_alpha_tol = file.number("thresholds.exit_alpha_tol", t.exit_alpha_tol);
  t.exit_limit_tol = file.number("thresholds.exit_limit_tol", t.exit_limit_tol);
  t.resolvent_alpha = file.number("thresholds.resolvent_alpha", t.resolvent_alpha);
  t.resolvent_alpha_tol = file.number("thresholds.resolvent_alpha_tol", t.resolvent_alpha_tol);
  t.resolvent_ode_tol = file.number("thresholds.resolvent_ode_tol", t.resolvent_ode_tol);
  t.resolvent_lowest_order_k =
      file.number("thresholds.resolvent_lowest_order_k", t.resolvent_lowest_order_k);
  t.mc_sigmas = file.number("thresholds.mc_sigmas", t.mc_sigmas);
  t.sign_abs_tol = file.number("thresholds.sign_abs_tol", t.sign_abs_tol);
  t.sign_sigmas = file.number("thresholds.sign_sigmas", t.sign_sigmas);
  t.ks_max = file.number("thresholds.ks_max", t.ks_max);
  t.plateau_rel_tol = file.number("thresholds.plateau_rel_tol", t.plateau_rel_tol);
  t.averaging_slope = file.number("thresholds.averaging_slope", t.averaging_slope);
  t.averaging_slope_tol = file.number("thresholds.averaging_slope_tol", t.averaging_slope_tol);
  return cfg;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  const auto file = ConfigFile::load(path);
  return experiment_from_config(file, path.parent_path());
}

}  // namespace ihom
