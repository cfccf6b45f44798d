// Counter-based random streams. Every variate is a pure function of
// (seed, key words), so draws are independent of enumeration order,
// thread schedule and platform.
#pragma once

#include <cstdint>
#include <initializer_list>

namespace ncchern::rng {

// SplitMix64 finalizer; the standard constants.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Chains the finalizer over the key words: h = sm(sm(sm(seed) ^ k1) ^ k2) ...
inline std::uint64_t keyed(std::uint64_t seed,
                           std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t k : keys) h = splitmix64(h ^ k);
  return h;
}

// Uniform double in [0,1) from the top 53 bits.
inline double to_unit(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Uniform in [-1/2, 1/2).
inline double to_symmetric_unit(std::uint64_t h) { return to_unit(h) - 0.5; }

}  // namespace ncchern::rng
