#ifndef STPARSE_RANDOM_H_
#define STPARSE_RANDOM_H_

// Portable random helpers. std::mt19937_64 is fully specified by the
// standard, but the std distributions are not, so everything that must be
// reproducible across standard libraries goes through these helpers.

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace stparse {

using Rng = std::mt19937_64;

inline uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent sub-seed for a named component from the run seed.
inline uint64_t DeriveSeed(uint64_t seed, std::string_view component) {
  uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : component) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return SplitMix64(seed ^ SplitMix64(h));
}

// Uniform integer in [0, n). n must be positive.
inline uint64_t UniformIndex(Rng& rng, uint64_t n) {
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

// Uniform double in [0, 1).
inline double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename T>
void Shuffle(std::vector<T>& items, Rng& rng) {
  for (size_t i = items.size(); i > 1; --i) {
    size_t j = UniformIndex(rng, i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace stparse

#endif  // STPARSE_RANDOM_H_
