#pragma once

#include <cstdint>

namespace apinn {

// Counter-based deterministic random numbers (SplitMix64 finalizer).
//
// Every draw is a pure function of (seed, stream, counter), so independent
// streams stay independent of evaluation order and of each other. Streams are
// small integers chosen by the caller (one per sampling region, one per
// network layer, ...).

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

inline std::uint64_t rng_word(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  std::uint64_t h = detail::splitmix64(seed + 0x9e3779b97f4a7c15ULL);
  h = detail::splitmix64(h ^ (stream + 0xd1b54a32d192ed03ULL));
  h = detail::splitmix64(h ^ (counter + 0x8cb92ba72f3d8dd7ULL));
  return h;
}

// Uniform double in [0, 1) with 53 random bits.
inline double rng_unit(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  return static_cast<double>(rng_word(seed, stream, counter) >> 11) * 0x1.0p-53;
}

// Uniform double in [lo, hi).
inline double rng_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter,
                          double lo, double hi) {
  return lo + (hi - lo) * rng_unit(seed, stream, counter);
}

}  // namespace apinn
