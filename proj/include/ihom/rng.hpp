#pragma once

// Counter-based random streams (Philox4x32-10, Salmon et al. SC 2011).
//
// A stream is addressed by (master seed, tag, index). Every path of an
// ensemble draws from its own stream, so results do not depend on how paths
// are scheduled across workers.

#include <array>
#include <cstdint>

#include <boost/random/normal_distribution.hpp>

namespace ihom {

class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block generate(Block ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kM0 = 0xD2511F53;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57;
  static constexpr std::uint32_t kW0 = 0x9E3779B9;
  static constexpr std::uint32_t kW1 = 0xBB67AE85;
};

/// Stream tags keep the random numbers of different experiments apart even
/// when they share a master seed.
enum class StreamTag : std::uint32_t {
  micro_paths = 1,
  limit_paths = 2,
  resolvent = 3,
  averaging = 4,
  test = 99,
};

class RandomStream {
 public:
  using result_type = std::uint32_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xFFFFFFFFu; }
  result_type operator()() { return bits32(); }

  RandomStream(std::uint64_t seed, StreamTag tag, std::uint32_t index)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        tag_(static_cast<std::uint32_t>(tag)),
        index_(index) {}

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() {
    if (cursor_ >= 3) refill();
    const std::uint64_t hi = buffer_[cursor_];
    const std::uint64_t lo = buffer_[cursor_ + 1];
    cursor_ += 2;
    const std::uint64_t bits = ((hi << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  /// Next raw 32-bit word of the stream.
  std::uint32_t bits32() {
    if (cursor_ >= 4) refill();
    return buffer_[cursor_++];
  }

  /// Standard normal (ziggurat, driven by the 32-bit words of the stream).
  double normal() { return normal_(*this); }

  std::uint64_t blocks_used() const { return counter_; }

 private:
  void refill() {
    const Philox4x32::Block ctr{static_cast<std::uint32_t>(counter_),
                                static_cast<std::uint32_t>(counter_ >> 32), index_, tag_};
    buffer_ = Philox4x32::generate(ctr, key_);
    ++counter_;
    cursor_ = 0;
  }

  Philox4x32::Key key_;
  std::uint32_t tag_;
  std::uint32_t index_;
  std::uint64_t counter_ = 0;
  Philox4x32::Block buffer_{};
  int cursor_ = 4;
  boost::random::normal_distribution<double> normal_;
};

}  // namespace ihom
