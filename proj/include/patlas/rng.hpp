#pragma once

#include <cstdint>

namespace patlas {

/// SplitMix64 (Steele, Lea & Flood; the java.util.SplittableRandom mixer).
/// Counter-based: the state advances by the 64-bit golden-ratio constant and
/// each output is a fixed avalanche mix of the counter, so identical seeds
/// reproduce identical streams on every platform and language.
class SplitMix64 {
 public:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  /// Decorrelated substream keyed by (seed, stream): the stream id is mixed
  /// through the avalanche function so substreams are not shifted copies of
  /// one another.
  static SplitMix64 substream(std::uint64_t seed, std::uint64_t stream) {
    return SplitMix64(mix(seed ^ mix((stream + 1) * kGolden)));
  }

  std::uint64_t next() {
    state_ += kGolden;
    return mix(state_);
  }

  /// Uniform double in [0, 1), 53 random mantissa bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

}  // namespace patlas
