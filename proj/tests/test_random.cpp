#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "elmsol/random.hpp"

using namespace elmsol;

TEST_CASE("splitmix64 reference values") {
  // Published outputs for a state starting at 0.
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
  static_assert(mix_seed(1, 2, 3) == splitmix64(splitmix64(splitmix64(1) ^ 2) ^ 3));
  CHECK(mix_seed(42, 1, 0) != mix_seed(42, 0, 1));
}

TEST_CASE("uniform01 uses the top 53 bits") {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t u = b.next_u64();
    CHECK(a.uniform01() == static_cast<double>(u >> 11) / 9007199254740992.0);
  }
}

TEST_CASE("uniform stays in range") {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double x = rng.uniform(-1.0, 1.0);
    CHECK(x >= -1.0);
    CHECK(x < 1.0);
  }
}

TEST_CASE("below is unbiased enough and bounded") {
  Rng rng(3);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto k = rng.below(7);
    REQUIRE(k < 7);
    ++counts[k];
  }
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
  CHECK(rng.below(1) == 0);
}

TEST_CASE("normal has unit moments") {
  Rng rng(11);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
}

TEST_CASE("shuffle is a seeded permutation") {
  std::vector<int> a(100), b(100);
  std::iota(a.begin(), a.end(), 0);
  b = a;
  Rng r1(5), r2(5);
  r1.shuffle(std::span<int>(a));
  r2.shuffle(std::span<int>(b));
  CHECK(a == b);
  std::vector<int> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> expect(100);
  std::iota(expect.begin(), expect.end(), 0);
  CHECK(sorted == expect);
  CHECK(a != expect);
}
