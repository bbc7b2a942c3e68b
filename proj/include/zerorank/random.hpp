#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace zerorank {

/// SplitMix64 finaliser; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Hashes a (seed, key...) tuple into one 64-bit stream key.
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a) noexcept {
  return mix64(mix64(seed) ^ (a + 0x632be59bd9b4e019ULL));
}
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a,
                                   std::uint64_t b) noexcept {
  return stream_key(stream_key(seed, a), b);
}

/// xoshiro256** generator. Small state, so one instance per replicate /
/// permutation is cheap; streams keyed by (seed, index) make parallel
/// Monte Carlo reproducible regardless of scheduling.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) noexcept {
    std::uint64_t z = seed;
    for (auto& s : state_) {
      z += 0x9e3779b97f4a7c15ULL;
      s = mix64(z);
    }
  }

  /// Generator for stream `index` under `seed`.
  static Rng stream(std::uint64_t seed, std::uint64_t index) noexcept {
    return Rng(stream_key(seed, index));
  }
  static Rng stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
    return Rng(stream_key(seed, a, b));
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
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

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform integer on [0, bound) via Lemire's multiply-shift rejection.
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

double sample_standard_normal(Rng& rng);

/// Gamma(shape, 1) by Marsaglia and Tsang's squeeze method; shapes below one
/// use the U^(1/shape) boost.
double sample_gamma(Rng& rng, double shape);

/// Beta(a, b) as X / (X + Y) with X ~ Gamma(a), Y ~ Gamma(b).
double sample_beta(Rng& rng, double a, double b);

/// Binomial(trials, prob).
std::uint64_t sample_binomial(Rng& rng, std::uint64_t trials, double prob);

}  // namespace zerorank
