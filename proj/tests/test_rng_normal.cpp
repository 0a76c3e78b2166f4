#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "covaudit/normal.hpp"
#include "covaudit/rng.hpp"

using namespace covaudit;

namespace {

// Independent oracle for the normal quantile: bisection against the
// erfc-based CDF.  Work on the lower half only — near 1 the CDF saturates
// and cannot resolve tail quantiles, while erfc of a positive argument keeps
// full relative accuracy.
double qnorm_bisect(double u) {
  if (u > 0.5) return -qnorm_bisect(1.0 - u);
  double lo = -40.0, hi = 0.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(-mid / std::sqrt(2.0)) < u)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("normal_cdf basics") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(-1.0) + normal_cdf(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(normal_cdf(1.2815515655446004) == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(normal_cdf(10.0) == 1.0);  // saturates in double precision
  CHECK(normal_cdf(-10.0) < 1e-20);
  // pdf spot value: 1/sqrt(2*pi)
  CHECK(normal_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-15));
}

TEST_CASE("normal_quantile matches a bisection oracle") {
  // Frozen values from the oracle itself, spot-checked against standard
  // tables (e.g. Phi^{-1}(0.975) = 1.95996...).
  CHECK(normal_quantile(0.975) == doctest::Approx(1.9599639845400532).epsilon(1e-13));
  CHECK(normal_quantile(0.01) == doctest::Approx(-2.3263478740408416).epsilon(1e-13));
  CHECK(normal_quantile(0.9) == doctest::Approx(1.2815515655446004).epsilon(1e-13));
  CHECK(std::abs(normal_quantile(0.5)) < 1e-15);

  for (double u : {1e-10, 1e-4, 0.03, 0.2, 0.4, 0.6, 0.8, 0.97, 0.9999,
                   1.0 - 1e-10}) {
    double q = normal_quantile(u);
    double ref = qnorm_bisect(u);
    CHECK(std::abs(q - ref) <= 1e-9 * std::max(1.0, std::abs(ref)));
    // Round-trip through the CDF.
    CHECK(normal_cdf(q) == doctest::Approx(u).epsilon(1e-12));
  }

  CHECK_THROWS_AS((void)normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS((void)normal_quantile(1.0), std::domain_error);
  CHECK_THROWS_AS((void)normal_quantile(-0.5), std::domain_error);
}

TEST_CASE("rng determinism and substreams") {
  Rng a(42), b(42), c(43);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 16; ++i) {
    std::uint64_t x = a.next_u64();
    all_equal = all_equal && x == b.next_u64();
    any_diff = any_diff || x != c.next_u64();
  }
  CHECK(all_equal);
  CHECK(any_diff);

  // Named substreams separate consumers; name and index both matter.
  CHECK(substream(7, "folds") == substream(7, "folds"));
  CHECK(substream(7, "folds") != substream(7, "wsc"));
  CHECK(substream(7, "tree", 0) != substream(7, "tree", 1));
  CHECK(substream(7, "tree", 3) != substream(8, "tree", 3));
}

TEST_CASE("rng uniform ranges and moments") {
  Rng rng(1);
  double sum = 0.0, lo = 1.0, hi = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);

  std::set<std::uint64_t> seen;
  for (int i = 0; i < 200; ++i) {
    std::uint64_t v = rng.uniform_int(7);
    CHECK(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);  // all residues reachable

  double x = rng.uniform(-2.0, 3.0);
  CHECK(x >= -2.0);
  CHECK(x < 3.0);
}

TEST_CASE("rng normal draws come from the inverse CDF of the uniform stream") {
  // Structural identity: a fresh generator with the same seed must produce
  // normal() == normal_quantile(uniform01()) draw for draw.
  Rng a(99), b(99);
  for (int i = 0; i < 50; ++i) {
    double u = a.uniform01();
    double z = b.normal();
    REQUIRE(u > 0.0);  // rejection loop not exercised here
    CHECK(z == normal_quantile(u));
  }

  Rng rng(5);
  double m = 0.0, m2 = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double z = rng.normal();
    m += z;
    m2 += z * z;
  }
  m /= n;
  m2 /= n;
  CHECK(std::abs(m) < 0.03);
  CHECK(m2 - m * m == doctest::Approx(1.0).epsilon(0.04));
}

TEST_CASE("rng shuffle is a seeded permutation") {
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  std::vector<int> w = v;
  Rng a(3), b(3);
  a.shuffle(v);
  b.shuffle(w);
  CHECK(v == w);
  std::multiset<int> sorted(v.begin(), v.end());
  std::vector<int> identity(50);
  for (int i = 0; i < 50; ++i) {
    CHECK(sorted.count(i) == 1);
    identity[i] = i;
  }
  CHECK(v != identity);  // astronomically unlikely to stay in place
}
