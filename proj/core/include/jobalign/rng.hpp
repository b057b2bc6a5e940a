#pragma once

#include <cstdint>

namespace jobalign {

// SplitMix64. Every piece of randomness in the library (shuffles, parameter
// init, synthetic data) flows through this generator so that runs are
// reproducible bit-for-bit across platforms. The constants are fixed:
//
//   state' = state + 0x9e3779b97f4a7c15            (golden-ratio gamma)
//   z = state'
//   z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//   z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//   output = z ^ (z >> 31)
class SplitMix64 {
 public:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += kGamma;
    return mix(state_);
  }

  // Uniform double in [0, 1) from the top 53 bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform index in [0, n). Drawn as next() % n; the modulo bias is below
  // 2^-53 for any desk-scale n and identical everywhere, which is what the
  // determinism contract needs.
  std::uint64_t next_below(std::uint64_t n) { return next() % n; }

  // The SplitMix64 output permutation on its own (no state step).
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Decorrelated per-purpose seeds derived from the single user seed.
// Epoch k of the batch shuffle uses stream k; other consumers use the
// named streams below.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream) {
  return SplitMix64::mix(seed + (stream + 1) * SplitMix64::kGamma);
}

// Stream ids far above any plausible epoch index.
inline constexpr std::uint64_t kParamsInitStream = 0x8000000000000001ULL;
inline constexpr std::uint64_t kSyntheticStream = 0x8000000000000002ULL;

}  // namespace jobalign
