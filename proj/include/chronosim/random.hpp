// Seeded random streams.
//
// A simulation owns one root seed. Every consumer (an oscillator, a link, a
// node's software stack) derives its own stream from the root seed and a
// stable string key, so adding a consumer never shifts another's draws.
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace chronosim {

constexpr uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// FNV-1a; stable across platforms and runs.
constexpr uint64_t stable_hash(std::string_view key) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr uint64_t derive_seed(uint64_t root, std::string_view key) {
  return splitmix64(root ^ splitmix64(stable_hash(key)));
}

using Rng = std::mt19937_64;

inline Rng make_stream(uint64_t root, std::string_view key) { return Rng(derive_seed(root, key)); }

/// Standard normal draw that depends only on (seed, index), not on how many
/// draws were made before. Used for per-edge jitter, which must not depend
/// on how often a clock happens to be read.
double hashed_normal(uint64_t seed, uint64_t index);

}  // namespace chronosim
