#pragma once

#include <array>
#include <cstdint>

namespace curstat {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of the stream with the given index under a master seed. Streams are
/// addressed by (master, index) so replicate k always sees the same numbers,
/// whatever the thread schedule.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) ^ mix64(index ^ 0xD1B54A32D192ED03ULL));
}

/// xoshiro256** generator with the few draws the estimators need. All draws
/// are defined here (no std:: distributions) so results are identical across
/// standard libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) noexcept {
    std::uint64_t s = seed;
    for (auto& word : state_) {
      word = mix64(s);
      s += 0x9E3779B97F4A7C15ULL;
    }
  }

  RandomStream(std::uint64_t master, std::uint64_t index) noexcept
      : RandomStream(derive_seed(master, index)) {}

  std::uint64_t next() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform on (lo, hi).
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Sum of `trials` Bernoulli(p) draws; tied observations are small counts.
  std::int64_t binomial(std::int64_t trials, double p) noexcept {
    std::int64_t k = 0;
    for (std::int64_t i = 0; i < trials; ++i) k += bernoulli(p) ? 1 : 0;
    return k;
  }

  /// Uniform integer in [0, bound), bound > 0 (Lemire's multiply-shift with rejection).
  std::uint64_t below(std::uint64_t bound) noexcept {
    unsigned __int128 product = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        product = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<std::uint64_t>(product);
      }
    }
    return static_cast<std::uint64_t>(product >> 64);
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

}  // namespace curstat
