#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "elmsol/error.hpp"
#include "elmsol/metrics.hpp"

using namespace elmsol;
using V = std::vector<double>;

TEST_CASE("mre hand cases") {
  CHECK(mre(V{1, 2}, V{1, 2}) == 0.0);
  CHECK(mre(V{1, 2}, V{1.1, 1.8}) == doctest::Approx(10.0).epsilon(1e-14));
  CHECK_THROWS_AS(mre(V{1, 0, 2}, V{1, 1, 1}), DegenerateError);
  // Signed variant keeps direction: (-10% + 10%) / 2.
  CHECK(mre_signed(V{1, 2}, V{1.1, 1.8}) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(mre_signed(V{1, 2}, V{1.1, 2.2}) == doctest::Approx(-10.0).epsilon(1e-14));
}

TEST_CASE("mse and rmse hand cases") {
  CHECK(mse(V{1, 2, 3}, V{1, 2, 3}) == 0.0);
  CHECK(mse(V{0, 0}, V{1, 1}) == 1.0);
  CHECK(rmse(V{0, 0}, V{1, 1}) == 1.0);
  CHECK(mse(V{0, 0}, V{3, -3}) == 9.0);
  CHECK(rmse(V{0, 0}, V{3, -3}) == 3.0);
  CHECK_THROWS_AS(mse(V{1, 2}, V{1}), ShapeError);
  CHECK_THROWS_AS(mse(V{}, V{}), ShapeError);
}

TEST_CASE("r_squared hand cases") {
  CHECK(r_squared(V{1, 2, 3}, V{1, 2, 3}) == 1.0);
  CHECK(r_squared(V{1, 2, 3}, V{2, 2, 2}) == 0.0);
  CHECK(r_squared(V{1, 2, 3}, V{1, 2, 4}) == 0.5);
  CHECK_THROWS_AS(r_squared(V{2, 2, 2}, V{1, 2, 3}), DegenerateError);
  CHECK_THROWS_AS(r_squared(V{2}, V{2}), DegenerateError);
}

TEST_CASE("metric properties on random vectors") {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  std::normal_distribution<double> noise(0.0, 0.5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 40);
    V a(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = u(gen);
      p[i] = a[i] + noise(gen);
    }
    const double m = mse(a, p);
    const double r = rmse(a, p);
    CHECK(std::abs(m - r * r) <= 1e-12 * m);

    // Identical permutation of both vectors.
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    V ap(n), pp(n);
    for (std::size_t i = 0; i < n; ++i) {
      ap[i] = a[perm[i]];
      pp[i] = p[perm[i]];
    }
    CHECK(mse(ap, pp) == doctest::Approx(m).epsilon(1e-12));
    CHECK(mre(ap, pp) == doctest::Approx(mre(a, p)).epsilon(1e-12));
    CHECK(r_squared(ap, pp) == doctest::Approx(r_squared(a, p)).epsilon(1e-12));

    // Common affine transform leaves R^2 unchanged.
    const double alpha = trial % 2 ? -3.7 : 0.02;
    const double gamma = 11.0;
    V aa(n), pa(n);
    for (std::size_t i = 0; i < n; ++i) {
      aa[i] = alpha * a[i] + gamma;
      pa[i] = alpha * p[i] + gamma;
    }
    CHECK(std::abs(r_squared(aa, pa) - r_squared(a, p)) <= 1e-10);

    CHECK(mre(a, p) >= 0.0);
    CHECK(mre(a, a) == 0.0);
  }
}

TEST_CASE("evaluate bundles the four measures and serializes") {
  const V a = {1, 2, 3, 4};
  const V p = {1.1, 1.9, 3.2, 3.9};
  const EvalReport r = evaluate(a, p);
  CHECK(r.n == 4);
  CHECK(r.rmse == doctest::Approx(std::sqrt(r.mse)).epsilon(1e-15));
  CHECK(r.r2 == doctest::Approx(r_squared(a, p)));
  const EvalReport back = eval_report_from_json(to_json(r));
  CHECK(back.r2 == r.r2);
  CHECK(back.mse == r.mse);
  CHECK(back.n == r.n);

  const std::vector<std::pair<std::string, EvalReport>> rows = {{"Training", r}, {"Testing", r}};
  const std::string table = format_table(rows);
  CHECK(table.find("R2") != std::string::npos);
  CHECK(table.find("MRE(%)") != std::string::npos);
  CHECK(table.find("Testing") != std::string::npos);
}
