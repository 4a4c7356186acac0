#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace qdos {

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-style key derivation: the stream for (seed, k1, k2, ...) does not
// depend on which other keys were drawn before it.
inline std::uint64_t derive_key(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

inline Engine keyed_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  return Engine(derive_key(seed, keys));
}

// Uniform double in [0, 1) from a single key.
inline double keyed_uniform(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  return static_cast<double>(derive_key(seed, keys) >> 11) * 0x1.0p-53;
}

}  // namespace qdos
