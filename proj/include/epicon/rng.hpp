#pragma once

#include <cstdint>
#include <random>

namespace epicon {

using Rng = std::mt19937_64;

/// Independent sub-streams of one trial seed.
enum class Stream : std::uint64_t { Spawn = 1, Schedule = 2, Variant = 3 };

/// splitmix64 finalizer; decorrelates nearby seeds before seeding the engine.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline Rng make_stream(std::uint64_t seed, Stream stream) {
  return Rng(mix64(mix64(seed) ^ static_cast<std::uint64_t>(stream)));
}

}  // namespace epicon
