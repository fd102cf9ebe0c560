#pragma once

#include <cstdint>
#include <random>

namespace compbf {

// SplitMix64 finalizer; used to decorrelate seed material for substreams.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Deterministic per-counter substream: stream i of a master seed is independent
// of thread scheduling, so parallel runs are reproducible by construction.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s0 = splitmix64(seed ^ 0x5851F42D4C957F2DULL);
  std::uint64_t s1 = splitmix64(s0 + stream);
  std::uint64_t s2 = splitmix64(s1);
  std::uint64_t s3 = splitmix64(s2);
  std::seed_seq seq{
      static_cast<std::uint32_t>(s1), static_cast<std::uint32_t>(s1 >> 32),
      static_cast<std::uint32_t>(s2), static_cast<std::uint32_t>(s2 >> 32),
      static_cast<std::uint32_t>(s3), static_cast<std::uint32_t>(s3 >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace compbf
