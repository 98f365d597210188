#pragma once

#include <cstdint>
#include <random>

namespace qsagnac {

// SplitMix64 finalizer; used to derive independent substreams.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream tags keep substreams for different purposes disjoint.
enum class StreamTag : std::uint64_t {
  ScanOffset = 1,
  RecordOffset = 2,
  RecordCounts = 3,
  Drift = 4,
  Polarimeter = 5,
  MonteCarlo = 6,
  Calibration = 7,
  AngleSweep = 8,
};

// Deterministic generator for (seed, tag, index). Any number of these may be
// constructed concurrently; there is no shared state.
inline std::mt19937_64 substream(std::uint64_t seed, StreamTag tag,
                                 std::uint64_t index = 0) {
  std::uint64_t key = mix64(seed);
  key = mix64(key ^ static_cast<std::uint64_t>(tag));
  key = mix64(key ^ index);
  return std::mt19937_64(key);
}

}  // namespace qsagnac
