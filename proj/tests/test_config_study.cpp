#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "ihom/config.hpp"
#include "ihom/errors.hpp"
#include "ihom/stats.hpp"
#include "ihom/study.hpp"
#include "test_helpers.hpp"

using namespace ihom;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("ihom_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("config values") {
  const auto f = ConfigFile::parse(R"(# comment line
a = 1.5          # trailing comment
b = -2e-3
flag = true
off = false
name = "x # not a comment"
list = [1, 2.5,
        -3]
empty = []
table = {poly = [0, 1]}
dotted.key_2 = 7
seed = 18446744073709551615
)");
  CHECK(f.number("a") == 1.5);
  CHECK(f.number("b") == -2e-3);
  CHECK(f.flag("flag"));
  CHECK_FALSE(f.flag("off"));
  CHECK(f.string("name") == "x # not a comment");
  CHECK(f.array("list") == std::vector<double>{1.0, 2.5, -3.0});
  CHECK(f.array("empty").empty());
  CHECK(std::get<InlineTable>(f.at("table")).at("poly") == std::vector<double>{0.0, 1.0});
  CHECK(f.integer("dotted.key_2") == 7);
  CHECK(f.integer("seed") == 18446744073709551615ull);
  CHECK(f.number("missing", 3.0) == 3.0);
  CHECK(f.keys().size() == 10);
  CHECK_THROWS_AS(f.number("missing"), ConfigError);
  CHECK_THROWS_AS(f.number("flag"), ConfigError);
  CHECK_THROWS_AS(f.array("a"), ConfigError);
  CHECK_THROWS_AS(f.integer("a"), ConfigError);
  CHECK_THROWS_AS(f.integer("b"), ConfigError);
  CHECK_NOTHROW(f.require_known(f.keys()));
  CHECK_THROWS_AS(f.require_known({"a"}), ConfigError);
}

TEST_CASE("config syntax errors") {
  CHECK_THROWS_AS(ConfigFile::parse("a 1"), ConfigError);
  CHECK_THROWS_AS(ConfigFile::parse("a = 1\na = 2"), ConfigError);
  CHECK_THROWS_AS(ConfigFile::parse("a b = 1"), ConfigError);
  CHECK_THROWS_AS(ConfigFile::parse("a = [1, 2"), ConfigError);
  CHECK_THROWS_AS(ConfigFile::parse("a = \"open"), ConfigError);
  CHECK_THROWS_AS(ConfigFile::parse("a = nope"), ConfigError);
  CHECK_THROWS_AS(ConfigFile::parse("a = 1 2"), ConfigError);
  try {
    ConfigFile::parse("a = 1\n\nb = ?", "demo.cfg");
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("demo.cfg:3") != std::string::npos);
  }
  CHECK_THROWS_AS(ConfigFile::load("/nonexistent/ihom.cfg"), ConfigError);
}

TEST_CASE("hash") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
  CHECK(hex64(0x1f) == "000000000000001f");
}

TEST_CASE("drift from config") {
  const auto spec = drift_from_config(ConfigFile::parse(R"(
eta = 0.5
interface = "zero"
left.sin = []
right.sin = [-6.283185307179586]
)"));
  CHECK(spec == testing::asymmetric_spec());

  const auto blend = drift_from_config(ConfigFile::parse(R"(
eta = 0.25
interface = "blend"
left.cos = [0.5, 0.1]
right.sin = [1]
)"));
  CHECK(blend.interface_kind() == InterfaceKind::blend);
  CHECK(blend.eta() == 0.25);
  CHECK(blend.left() == PeriodicDrift({0.0, 0.0}, {0.5, 0.1}));

  const auto poly = drift_from_config(ConfigFile::parse(R"(
interface = {poly = [0.0, 0.0]}
)"));
  CHECK(poly.interface_kind() == InterfaceKind::polynomial);
  CHECK(poly.drift(0.3) == 0.0);

  CHECK_THROWS_AS(drift_from_config(ConfigFile::parse("right.const = 1")), ConfigError);
  CHECK_THROWS_AS(drift_from_config(ConfigFile::parse("left.cos0 = 1")), ConfigError);
  CHECK_THROWS_AS(drift_from_config(ConfigFile::parse("eta = 0")), ConfigError);
  CHECK_THROWS_AS(drift_from_config(ConfigFile::parse("interface = \"smooth\"")), ConfigError);
  CHECK_THROWS_AS(drift_from_config(ConfigFile::parse("interface = {p = [1]}")), ConfigError);
  CHECK_THROWS_AS(drift_from_config(ConfigFile::parse("interface = 3")), ConfigError);
  // b jumps at the interface edges
  CHECK_THROWS_AS(drift_from_config(ConfigFile::parse("interface = {poly = [1.0]}")),
                  ConfigError);
}

TEST_CASE("experiment config") {
  const auto dir = scratch_dir("experiment");
  write_file(dir / "drift.cfg", "eta = 0.5\nright.sin = [-6.283185307179586]\n");
  write_file(dir / "run.cfg", R"(drift = "drift.cfg"
seed = 99
study.eps = [0.4, 0.2]
checks.ks = false
thresholds.ks_max = 0.2
)");
  const auto cfg = load_experiment(dir / "run.cfg");
  CHECK(cfg.spec == testing::asymmetric_spec());
  CHECK(cfg.seed == 99);
  CHECK(cfg.eps_grid == std::vector<double>{0.4, 0.2});
  CHECK_FALSE(cfg.check_ks);
  CHECK(cfg.check_sign);
  CHECK(cfg.thresholds.ks_max == 0.2);
  CHECK(cfg.averaging_drift == cfg.spec.right());

  // the hash covers the drift file too
  write_file(dir / "drift.cfg", "eta = 0.5\nright.sin = [-6.0]\n");
  const auto changed = load_experiment(dir / "run.cfg");
  CHECK(changed.config_hash != cfg.config_hash);
  CHECK(load_experiment(dir / "run.cfg").config_hash == changed.config_hash);

  auto bad = [&](const std::string& text) {
    write_file(dir / "bad.cfg", text);
    return load_experiment(dir / "bad.cfg");
  };
  CHECK_THROWS_AS(bad("study.eps = [0.1, 0.2]\n"), ConfigError);
  CHECK_THROWS_AS(bad("study.eps = [2.0, 0.2]\n"), ConfigError);
  CHECK_THROWS_AS(bad("study.eps = []\n"), ConfigError);
  CHECK_THROWS_AS(bad("study.paths = 0\n"), ConfigError);
  CHECK_THROWS_AS(bad("stduy.paths = 10\n"), ConfigError);
  CHECK_THROWS_AS(bad("drift = \"drift.cfg\"\neta = 0.5\n"), ConfigError);
  CHECK_THROWS_AS(bad("drift = \"missing.cfg\"\n"), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("rate fits on synthetic data") {
  const std::vector<double> x{0.2, 0.1, 0.05, 0.025};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::sqrt(v));
  const auto exact = fit_rate(x, y);
  CHECK(exact.slope == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(exact.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(exact.r2 == doctest::Approx(1.0));

  std::mt19937_64 gen(5);
  std::normal_distribution<double> noise(0.0, 0.01);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> yn;
    for (double v : x) yn.push_back(v * (1.0 + noise(gen)));
    CHECK(std::abs(fit_rate(x, yn).slope - 1.0) <= 0.05);
  }

  const std::vector<double> flat(4, 0.7);
  CHECK(fit_rate(x, flat).slope == doctest::Approx(0.0).scale(1.0));
  CHECK_THROWS_AS(fit_rate(x, std::vector<double>{1.0, 0.0, 1.0, 1.0}), DegenerateFit);
  CHECK_THROWS_AS(fit_rate(x, std::vector<double>{1.0, -1.0, 1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(fit_rate(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 2.0}),
                  DomainError);

  const auto [a, b] = linear_fit(x, std::vector<double>{2.4, 1.2, 0.6, 0.3});
  CHECK(a == doctest::Approx(0.0).scale(1.0));
  CHECK(b == doctest::Approx(12.0));
}

TEST_CASE("statistics helpers") {
  std::vector<double> v(1000, 0.1);
  CHECK(compensated_sum(v) == doctest::Approx(100.0).epsilon(1e-15));
  const auto m = mean_and_error(std::vector<double>{1.0, 2.0, 3.0, 4.0});
  CHECK(m.mean == 2.5);
  CHECK(m.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(ks_two_sample({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(ks_two_sample({1, 2, 3}, {4, 5}) == 1.0);
  CHECK(ks_critical_value(10000) == doctest::Approx(0.01628));
  // uniform order statistics i/n against the uniform CDF
  std::vector<double> u;
  for (int i = 1; i <= 100; ++i) u.push_back(i / 100.0);
  CHECK(ks_statistic(u, [](double x) { return std::clamp(x, 0.0, 1.0); }) ==
        doctest::Approx(0.01));
}

TEST_CASE("KS distance of plain Brownian motion") {
  SimConfig cfg;
  cfg.eps = 0.5;
  cfg.paths = 4000;
  cfg.seed = 41;
  const auto e = simulate_micro(DriftSpec::zero_drift(), cfg, std::vector<double>{1.0});
  const SkewParams bm{0.5, 1.0, 1.0};
  CHECK(ks_distance(e, bm, 1.0) <= ks_critical_value(cfg.paths));
  const SkewParams wide{0.5, 1.5, 1.5};
  CHECK(ks_distance(e, wide, 1.0) > 0.05);
}

TEST_CASE("CSV writer") {
  const auto dir = scratch_dir("csv");
  {
    CsvWriter w(dir / "t.csv", 0xabcull, 42, {"x", "n", "s"});
    w.cell(0.1).cell(std::uint64_t{7}).cell("ok");
    w.end_row();
    w.cell(1.0 / 3.0);
    CHECK_THROWS_AS(w.end_row(), DomainError);
    w.cell(std::uint64_t{1}).cell("z");
    CHECK_THROWS_AS(w.cell(1.0), DomainError);
    w.end_row();
  }
  const auto lines = read_lines(dir / "t.csv");
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "# config_hash=0000000000000abc,seed=42");
  CHECK(lines[1] == "x,n,s");
  CHECK(lines[2] == "0.10000000000000001,7,ok");
  CHECK(std::stod(lines[3].substr(0, lines[3].find(','))) == 1.0 / 3.0);
  CHECK(format_number(0.5) == "0.5");
  CHECK(std::stod(format_number(1e-300)) == 1e-300);
  CHECK(std::stod(format_number(0.1 + 0.2)) == 0.1 + 0.2);
  CHECK_THROWS_AS(CsvWriter("/nonexistent/dir/t.csv", 0, 0, {"a"}), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("averaging weight") {
  CHECK(averaging_weight(0.5) == 1.0);
  CHECK(averaging_weight(0.0) == doctest::Approx(std::exp(-0.5)));
  CHECK(averaging_weight(1.0) == averaging_weight(0.0));
}
