#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ofm {

// All randomness in the library flows through two named generators:
//
//  - SplitMix64, used only to mix a user seed with stream tags (layer index,
//    stage, cycle, ...) into independent sub-seeds;
//  - Mt64, std::mt19937_64 with explicit bits-to-double mappings.
//
// std::mt19937_64 output is fully specified by the standard; the standard
// *distributions* are not, so they are not used anywhere. This keeps every
// draw reproducible from (seed, tags) alone.

struct SplitMix64 {
  uint64_t state;
  explicit SplitMix64(uint64_t s) : state(s) {}
  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
};

// Derives an independent sub-seed from (seed, a, b).
inline uint64_t mix_seed(uint64_t seed, uint64_t a, uint64_t b = 0) {
  SplitMix64 sm(seed);
  uint64_t h = sm.next();
  sm.state ^= a * 0x9e3779b97f4a7c15ull;
  h ^= sm.next();
  sm.state ^= b * 0xc2b2ae3d27d4eb4full;
  h ^= sm.next();
  return h;
}

class Mt64 {
 public:
  explicit Mt64(uint64_t seed) : eng_(seed) {}

  uint64_t bits() { return eng_(); }

  // Uniform in [0, 1), 53 mantissa bits.
  double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (pairs cached).
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double t = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(t);
    has_cached_ = true;
    return r * std::cos(t);
  }

  // Unbiased integer in [0, n) by rejection.
  int64_t below(int64_t n) {
    uint64_t un = static_cast<uint64_t>(n);
    uint64_t m = (UINT64_MAX % un + 1) % un;  // 2^64 mod n
    uint64_t bound_excl = UINT64_MAX - m;     // accept x <= bound_excl
    uint64_t x;
    do {
      x = bits();
    } while (x > bound_excl);
    return static_cast<int64_t>(x % un);
  }

 private:
  std::mt19937_64 eng_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace ofm
