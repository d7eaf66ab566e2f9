#pragma once

// Portable random streams. Every draw is defined bit-for-bit here so that
// synthetic data and class orders can be regenerated from a seed in any
// language:
//
//   splitmix64       expands a 64-bit seed into generator state
//   xoshiro256**     the stream itself (Blackman & Vigna)
//   uniform01        (next() >> 11) * 2^-53, in [0, 1)
//   bounded(n)       rejection sampling: draw r until r >= (2^64 - n) mod n,
//                    then return r mod n
//   normal           Box-Muller on u1 = 1 - uniform01(), u2 = uniform01():
//                    sqrt(-2 ln u1) * cos(2 pi u2), then
//                    sqrt(-2 ln u1) * sin(2 pi u2) on the next call
//   shuffle          Fisher-Yates from the back: for i = n-1 .. 1,
//                    swap(a[i], a[bounded(i + 1)])

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <utility>

namespace tfcl {

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

class Xoshiro256 {
 public:
  explicit constexpr Xoshiro256(std::uint64_t seed) noexcept {
    SplitMix64 sm(seed);
    for (auto& word : s_) word = sm.next();
  }

  constexpr std::uint64_t next() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  constexpr double uniform01() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Unbiased integer in [0, n). n must be >= 1.
  constexpr std::uint64_t bounded(std::uint64_t n) noexcept {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
};

/// Standard normal draws; both Box-Muller outputs are used in order.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) noexcept : rng_(seed) {}

  double next() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - rng_.uniform01();  // (0, 1]
    const double u2 = rng_.uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  Xoshiro256 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

template <typename T>
void fisher_yates_shuffle(std::span<T> items, Xoshiro256& rng) noexcept {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.bounded(i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace tfcl
