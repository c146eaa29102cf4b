#pragma once

#include <cstdint>
#include <limits>

namespace graph_deconv {

/// SplitMix64 generator. Satisfies UniformRandomBitGenerator so it can feed
/// the <random> distributions; one instance is created per call or trial.
class SplitMix64 {
public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform01() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// One fair coin flip mapped to -1 or +1.
  double sign() noexcept { return ((*this)() >> 63) != 0 ? -1.0 : 1.0; }

private:
  std::uint64_t state_;
};

/// Decorrelated sub-stream seed; keeps (seed, stream) pairs from overlapping.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  SplitMix64 mix(seed ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
  return mix();
}

} // namespace graph_deconv
