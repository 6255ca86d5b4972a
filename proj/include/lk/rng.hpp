#pragma once

#include <cstdint>

namespace lk {

/// SplitMix64 (Steele, Lea, Flood 2014). The stream for state s is
/// s += 0x9E3779B97F4A7C15 followed by the mix below; any language with 64-bit
/// unsigned arithmetic reproduces it exactly.
inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += kGolden;
    return mix64(state_);
  }

  /// Uniform in [0, 1) with 53 random bits.
  constexpr double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in the open interval (0, 1).
  constexpr double uniform_open() noexcept {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Independent stream for substream `index` of `seed`:
  /// state = mix64(seed) ^ mix64(index + 0x632BE59BD9B4E019).
  static constexpr SplitMix64 substream(std::uint64_t seed, std::uint64_t index) noexcept {
    return SplitMix64(mix64(seed) ^ mix64(index + 0x632BE59BD9B4E019ULL));
  }

 private:
  std::uint64_t state_;
};

}  // namespace lk
