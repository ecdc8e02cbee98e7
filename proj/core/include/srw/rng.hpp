#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace srw {

// Recorded in experiment metadata so other implementations can reproduce
// the streams. Determinism is guaranteed within one build; cross-language
// bit-identity is not a contract.
inline constexpr const char* kRngFamily = "splitmix64/box-muller";
inline constexpr const char* kRngStreamRecipe =
    "state0 = mix64(seed ^ mix64(index*0x9E3779B97F4A7C15 + "
    "0xBF58476D1CE4E5B9)); next(): state += 0x9E3779B97F4A7C15, out = "
    "mix64(state); uniforms take the top 53 bits; normals are Box-Muller "
    "pairs, samplers draw ceil(k/2) pairs and keep the first k values";

/// Counter-based splittable generator. Replica streams are derived from
/// (seed, index) by a fixed mixing recipe; identical inputs give identical
/// streams regardless of thread count or call interleaving across replicas.
struct SplitMix64 {
  std::uint64_t state = 0;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static SplitMix64 stream(std::uint64_t seed, std::uint64_t index) {
    return {mix(seed ^ mix(index * 0x9E3779B97F4A7C15ULL +
                           0xBF58476D1CE4E5B9ULL))};
  }

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    return mix(state);
  }

  /// Uniform in [0, 1).
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1]; safe as a log argument.
  double next_open_double() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; consumes two uniforms per pair.
  std::pair<double, double> next_normal_pair() {
    const double u1 = next_open_double();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }
};

}  // namespace srw
