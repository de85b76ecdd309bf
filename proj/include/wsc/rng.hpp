#pragma once

#include <cstdint>
#include <initializer_list>

namespace wsc {

// splitmix64 step. Also used as the mixing function for derived streams and
// per-pair corruption decisions, so every stream is a pure function of the
// seed material and never of platform library internals.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x63757276656265ULL;
  for (std::uint64_t p : parts) h = mix64(h ^ mix64(p));
  return h;
}

inline int ceil_log2(long long n) {
  if (n < 2) return 1;
  int b = 0;
  long long v = 1;
  while (v < n) {
    v <<= 1;
    ++b;
  }
  return b;
}

// Deterministic RNG used across the library in place of <random> engines;
// identical seeds reproduce identical byte-level output on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), state_(mix64(seed)) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Unbiased integer in [0, n), n >= 1.
  std::uint64_t next_below(std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t mask = ~0ULL >> __builtin_clzll(n | 1);
    std::uint64_t v;
    do {
      v = next_u64() & mask;
    } while (v >= n);
    return v;
  }

  double next_real() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller on the deterministic stream.
  double next_gaussian() {
    double u1 = 0;
    while (u1 <= 0) u1 = next_real();
    double u2 = next_real();
    return __builtin_sqrt(-2.0 * __builtin_log(u1)) *
           __builtin_cos(6.283185307179586476925286766559 * u2);
  }

  // Child stream independent of this stream's position.
  Rng derive(std::uint64_t tag) const { return Rng(mix64({seed_, tag})); }
  Rng derive(std::uint64_t a, std::uint64_t b) const { return Rng(mix64({seed_, a, b})); }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

}  // namespace wsc
