#pragma once
// Seeded RNG with named substreams.  All randomness in the library flows from
// one root seed; independent consumers (folds, classifier fits, WSC directions,
// subsampling) draw from substreams so that adding draws in one place never
// shifts another.  Distribution transforms are implemented here instead of
// <random> because libstdc++/libc++/MSVC disagree on uniform_real_distribution
// output, and reports must be byte-identical for a given seed everywhere.

#include <cstdint>
#include <cmath>
#include <string_view>
#include <vector>

namespace covaudit {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Seed of the substream `name`/`index` under `root`.
inline std::uint64_t substream(std::uint64_t root, std::string_view name,
                               std::uint64_t index = 0) {
  return splitmix64(splitmix64(root ^ fnv1a64(name)) + index);
}

double normal_quantile(double u);  // defined in normal.cpp

// xoshiro-style generator built on splitmix64 streams: small, fast and fully
// specified, so sequences are reproducible across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    for (auto& w : s_) {
      seed = splitmix64(seed);
      w = seed;
    }
  }

  std::uint64_t next_u64() {  // xoshiro256**
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0,1) with 53-bit resolution.
  double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on [lo,hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0,n), rejection sampled (no modulo bias).
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal via inverse CDF; one uniform consumed per draw.
  double normal() {
    double u;
    do {
      u = uniform01();
    } while (u <= 0.0);  // quantile needs u in (0,1)
    return normal_quantile(u);
  }

  // In-place Fisher-Yates shuffle.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = std::size_t(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

}  // namespace covaudit
