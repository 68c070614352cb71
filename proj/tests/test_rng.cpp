#include <doctest.h>

#include <cmath>
#include <set>

#include "ihom/rng.hpp"
#include "ihom/stats.hpp"

using namespace ihom;

TEST_CASE("philox known answers") {
  using B = Philox4x32::Block;
  CHECK(Philox4x32::generate(B{0, 0, 0, 0}, {0, 0}) ==
        B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::generate(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                             {0xffffffff, 0xffffffff}) ==
        B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::generate(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                             {0xa4093822, 0x299f31d0}) ==
        B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
  RandomStream a(42, StreamTag::test, 7);
  RandomStream b(42, StreamTag::test, 7);
  RandomStream c(42, StreamTag::test, 8);
  RandomStream d(42, StreamTag::micro_paths, 7);
  RandomStream e(43, StreamTag::test, 7);
  for (int i = 0; i < 100; ++i) {
    const double x = a.normal();
    CHECK(x == b.normal());
    CHECK(x != c.normal());
    CHECK(x != d.normal());
    CHECK(x != e.normal());
  }
}

TEST_CASE("uniforms lie in the open unit interval") {
  RandomStream r(1, StreamTag::test, 0);
  std::vector<double> u(100000);
  for (auto& x : u) {
    // odd word counts must not break the 53-bit draws
    if (r.bits32() % 3 == 0) r.bits32();
    x = r.uniform();
    REQUIRE(x > 0.0);
    REQUIRE(x < 1.0);
  }
  const double ks = ks_statistic(u, [](double y) { return std::clamp(y, 0.0, 1.0); });
  CHECK(ks < ks_critical_value(u.size()));
}

TEST_CASE("normals have standard moments and law") {
  RandomStream r(3, StreamTag::test, 1);
  std::vector<double> z(200000);
  for (auto& x : z) x = r.normal();
  const auto m = mean_and_error(z);
  CHECK(std::abs(m.mean) < 4 * m.std_error);
  std::vector<double> sq(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) sq[i] = z[i] * z[i];
  const auto v = mean_and_error(sq);
  CHECK(std::abs(v.mean - 1.0) < 4 * v.std_error);
  const double ks = ks_statistic(z, [](double y) { return 0.5 * std::erfc(-y / std::sqrt(2.0)); });
  CHECK(ks < ks_critical_value(z.size()));
}
