// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace bigjump {

namespace detail {
// SplitMix64 finalizer (Steele/Lea/Flood; Vigna's fixed-increment variant).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}
}  // namespace detail

// 64-bit counter-based generator. One instance per (seed, replication,
// component) key; streams with distinct keys are statistically independent,
// so parallel replications need no coordination.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return detail::mix64(state_);
  }

  // Uniform on the open interval (0,1); never returns 0 or 1, so log/pow
  // transforms stay finite.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

// Substream keyed by (seed, replication index, component index). The key is
// hashed through two finalizer rounds so that neighbouring indices land in
// unrelated regions of the state space.
inline SplitMix64 make_stream(std::uint64_t seed, std::uint64_t replication,
                              std::uint64_t component) {
  std::uint64_t k = detail::mix64(seed + 0x9E3779B97F4A7C15ULL * (replication + 1));
  k = detail::mix64(k ^ (0xD1B54A32D192ED03ULL * (component + 1)));
  return SplitMix64(k);
}

}  // namespace bigjump
