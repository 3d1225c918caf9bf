#pragma once

// Seeded random streams used everywhere in the toolkit.
//
// Every stream is a std::mt19937_64 (MT19937-64, the standard 64-bit Mersenne
// Twister) seeded with a single 64-bit value. The derived draws below are
// spelled out instead of using <random> distributions, whose outputs are
// implementation-defined, so results are identical across standard libraries
// and can be reproduced in other languages:
//
//   uniform01()      (u64 >> 11) * 2^-53                       in [0, 1)
//   uniform(lo, hi)  lo + (hi - lo) * uniform01()
//   below(n)         rejection sampling on u64 % n with limit
//                    2^64 - (2^64 mod n)                        in [0, n)
//   normal()         Box-Muller, cos branch only, u1 = 1 - uniform01()
//   shuffle          Fisher-Yates, i from size-1 down to 1, j = below(i + 1)
//
// Seed mixing for independent sub-streams uses SplitMix64 finalisation.

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace elmsol {

// SplitMix64 output function applied to x.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Derives a sub-stream seed from a base seed and two indices:
//   splitmix64(splitmix64(splitmix64(base) ^ a) ^ b)
constexpr std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b) noexcept {
  return splitmix64(splitmix64(splitmix64(base) ^ a) ^ b);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  std::uint64_t below(std::uint64_t n);

  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    if (items.size() < 2) return;
    for (std::size_t i = items.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(below(i + 1));
      using std::swap;
      swap(items[i], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace elmsol
