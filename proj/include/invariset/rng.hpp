#pragma once

// Counter-based pseudo-random numbers.
//
// Every draw is a pure function of (stream seed, draw index), so any draw in
// any stream can be produced independently of how many draws happened before
// it or which worker thread asked for it.  This is what makes sampled runs
// bitwise reproducible regardless of the worker count: parallel code assigns
// indices, never shares generator state.
//
// The mixer is the SplitMix64 finalizer, which is bijective on 64-bit words
// and passes standard statistical batteries when driven by a Weyl sequence.

#include <cstdint>

namespace invariset::rng {

/// SplitMix64 finalizer: avalanche-mixes one 64-bit word.
inline std::uint64_t mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// The index-th word of the stream identified by `seed`.
inline std::uint64_t at(std::uint64_t seed, std::uint64_t index) noexcept {
  // Weyl increment (golden-ratio constant) keeps consecutive counter values
  // far apart in the mixer's input space.
  return mix(seed + (index + 1) * 0x9E3779B97F4A7C15ull);
}

/// The index-th draw of stream `seed`, mapped to a double in [0, 1).
/// Uses the top 53 bits, so every representable value is a multiple of 2^-53.
inline double unit(std::uint64_t seed, std::uint64_t index) noexcept {
  return static_cast<double>(at(seed, index) >> 11) * 0x1.0p-53;
}

/// A child stream id, statistically independent of the parent stream and of
/// children derived with other tags.  Used to give each consumer (sampling,
/// identification rounds, verification) its own stream from one user seed.
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) noexcept {
  return mix(seed ^ mix(tag + 0xA0761D6478BD642Full));
}

}  // namespace invariset::rng
