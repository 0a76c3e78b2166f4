#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "covaudit/conformal.hpp"
#include "covaudit/rng.hpp"

using namespace covaudit;

TEST_CASE("conformal_quantile picks the ceil((1-alpha)(n+1))-th order statistic") {
  // n = 9, alpha = 0.1: k = ceil(0.9 * 10) = 9, the largest of nine scores.
  std::vector<double> nine = {5, 1, 4, 2, 8, 3, 7, 6, 9};
  ConformalCalibration c = conformal_quantile(nine, 0.1);
  CHECK(c.k == 9);
  CHECK(c.n == 9);
  CHECK(c.q_hat == 9.0);
  CHECK(c.alpha == 0.1);

  // n = 19, alpha = 0.1: k = ceil(0.9 * 20) = 18.
  std::vector<double> scores;
  for (int i = 19; i >= 1; --i) scores.push_back(double(i));
  c = conformal_quantile(scores, 0.1);
  CHECK(c.k == 18);
  CHECK(c.q_hat == 18.0);

  // alpha = 0.5, n = 3: k = ceil(0.5 * 4) = 2.
  c = conformal_quantile({30, 10, 20}, 0.5);
  CHECK(c.k == 2);
  CHECK(c.q_hat == 20.0);

  // Duplicated scores are fine; the k-th smallest counts multiplicity.
  c = conformal_quantile({1, 1, 1, 2}, 0.5);  // k = ceil(0.5*5) = 3
  CHECK(c.k == 3);
  CHECK(c.q_hat == 1.0);
}

TEST_CASE("conformal_quantile returns +inf when k exceeds n") {
  // n = 5, alpha = 0.1: k = ceil(0.9 * 6) = 6 > 5.
  ConformalCalibration c = conformal_quantile({1, 2, 3, 4, 5}, 0.1);
  CHECK(std::isinf(c.q_hat));
  CHECK(c.q_hat > 0);
  CHECK(c.k == 0);
  CHECK(c.n == 5);

  CHECK_THROWS_AS((void)conformal_quantile({}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS((void)conformal_quantile({1.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)conformal_quantile({1.0}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)conformal_quantile({1.0}, -0.2), std::invalid_argument);
}

TEST_CASE("coverage is decided by score <= q_hat, boundary inclusive") {
  CHECK(interval_covers(2.0, 1.0, 1.0));        // |2-1| == q_hat
  CHECK(interval_covers(1.5, 1.0, 1.0));
  CHECK_FALSE(interval_covers(2.5, 1.0, 1.0));
  CHECK(interval_covers(100.0, 0.0,
                        std::numeric_limits<double>::infinity()));

  CHECK(interval_size(0.75) == 1.5);
  CHECK(std::isinf(interval_size(std::numeric_limits<double>::infinity())));

  CHECK(abs_residual_score(3.0, 5.5) == 2.5);
  CHECK(abs_residual_score(5.5, 3.0) == 2.5);
}

TEST_CASE("classification scores validate and order as documented") {
  std::vector<double> probs = {0.5, 0.3, 0.2};
  CHECK(neg_likelihood_score(probs, 0) == -0.5);
  CHECK(neg_likelihood_score(probs, 2) == -0.2);

  // Cumulative score sums the sorted-descending prefix through the label.
  CHECK(cumulative_score(probs, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cumulative_score(probs, 1) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(cumulative_score(probs, 2) == doctest::Approx(1.0).epsilon(1e-12));

  // Ties break by class index: with {0.4, 0.4, 0.2} class 0 precedes class 1.
  std::vector<double> tied = {0.4, 0.4, 0.2};
  CHECK(cumulative_score(tied, 0) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(cumulative_score(tied, 1) == doctest::Approx(0.8).epsilon(1e-12));

  std::vector<double> not_simplex = {0.5, 0.3};
  CHECK_THROWS_AS((void)neg_likelihood_score(not_simplex, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)cumulative_score(not_simplex, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)neg_likelihood_score(probs, 3), std::invalid_argument);
  CHECK_THROWS_AS((void)neg_likelihood_score(probs, -1), std::invalid_argument);
}

TEST_CASE("class_set_covers counts the set and may return empty sets") {
  std::vector<double> class_scores = {-0.5, -0.3, -0.2};
  ClassSetResult r = class_set_covers(class_scores, 0, -0.3);
  CHECK(r.covered);
  CHECK(r.cardinality == 2);  // classes 0 and 1 are at or below the cutoff

  r = class_set_covers(class_scores, 2, -0.3);
  CHECK_FALSE(r.covered);
  CHECK(r.cardinality == 2);

  // Cutoff below every score: the empty set, never covered.
  r = class_set_covers(class_scores, 0, -0.9);
  CHECK_FALSE(r.covered);
  CHECK(r.cardinality == 0);
}

TEST_CASE("calibrated cutoff attains finite-sample marginal coverage") {
  // Exchangeable scores: calibrate on n, test the n+1-th, repeat.  The hit
  // rate must land in [1-alpha, 1-alpha + 1/(n+1)) up to binomial noise.
  const std::size_t n = 49;
  const double alpha = 0.2;
  const int trials = 4000;
  Rng rng(314159);
  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> cal(n);
    for (double& s : cal) s = rng.normal();
    double fresh = rng.normal();
    ConformalCalibration c = conformal_quantile(cal, alpha);
    if (fresh <= c.q_hat) ++hits;
  }
  double rate = double(hits) / trials;
  double lo = 1.0 - alpha;
  double hi = 1.0 - alpha + 1.0 / double(n + 1);
  double se = std::sqrt(0.8 * 0.2 / trials);
  CHECK(rate > lo - 4.0 * se);
  CHECK(rate < hi + 4.0 * se);
}
