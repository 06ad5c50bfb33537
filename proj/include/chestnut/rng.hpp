#pragma once

// Deterministic random streams. One root seed; every module draws from a
// labeled substream so that reordering modules (or running them in
// parallel) cannot change the numbers any one of them sees.
//
// Distributions are implemented here rather than taken from <random>
// because libstdc++/libc++/MSVC disagree on uniform_int_distribution
// output; the dataset must be reproducible bit-for-bit from (config, seed).

#include <cstdint>
#include <random>
#include <string_view>

namespace chestnut {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xCBF29CE484222325ull;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

/// Mersenne Twister wrapped with portable uniform draws.
class Rng {
public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  /// Unbiased integer in [lo, hi], inclusive. Lemire rejection sampling.
  int64_t uniform_int(int64_t lo, int64_t hi) {
    const uint64_t n = static_cast<uint64_t>(hi - lo) + 1;
    if (n == 0) return static_cast<int64_t>(next_u64()); // full 64-bit range
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    auto low = static_cast<uint64_t>(m);
    if (low < n) {
      const uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * n;
        low = static_cast<uint64_t>(m);
      }
    }
    return lo + static_cast<int64_t>(m >> 64);
  }

  /// Uniform double in [lo, hi). 53-bit mantissa resolution.
  double uniform_real(double lo, double hi) {
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }

private:
  std::mt19937_64 engine_;
};

/// Derives per-purpose substream seeds from one root seed.
struct SeedTree {
  uint64_t root = 1;

  uint64_t derive(std::string_view label, uint64_t index = 0) const {
    uint64_t h = splitmix64(root ^ fnv1a64(label));
    return splitmix64(h ^ index);
  }

  Rng stream(std::string_view label, uint64_t index = 0) const {
    return Rng(derive(label, index));
  }
};

}  // namespace chestnut
