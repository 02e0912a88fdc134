#pragma once

#include <cstdint>
#include <random>

namespace rlab {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent generator for (seed, stream, counter): the three words are mixed
// through splitmix64 and the result seeds a mt19937_64.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  std::uint64_t s = splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
  s = splitmix64(s ^ splitmix64(counter));
  return std::mt19937_64(s);
}

// Uniform double in [0, 1) with 53 random bits; identical on every platform.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace rlab
