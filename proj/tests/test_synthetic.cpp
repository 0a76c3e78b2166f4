#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "covaudit/normal.hpp"
#include "covaudit/rng.hpp"
#include "covaudit/synthetic.hpp"

using namespace covaudit;

namespace {

const std::vector<std::string> kMetricKeys = {
    "fsc",  "covgap",  "wcovgap", "wsc",    "eoc",   "ssc",
    "pearson", "hsic", "l1-ert",  "l2-ert", "kl-ert"};

Table3Config tiny_config() {
  Table3Config cfg;
  cfg.n_cal = 200;
  cfg.m_test = 150;
  cfg.repeats = 2;
  cfg.mc_samples = 2000;
  cfg.folds = 3;
  cfg.wsc_directions = 25;
  cfg.classifier.kind = ClassifierSpec::Kind::partition;
  cfg.seed = 11;
  return cfg;
}

}  // namespace

TEST_CASE("mean and noise-scale functions evaluate exactly") {
  CHECK(f_mean_1d(0.0) == 1.0);
  CHECK(f_mean_1d(1.0) == 3.0 * std::sin(1.0) + std::exp(1.0));
  CHECK(f_mean_1d(-0.5) == 3.0 * std::sin(-0.5) + std::exp(-0.5));

  CHECK(sigma_het(0.0) == 0.5);
  CHECK(sigma_het(0.5) == 1.25);
  CHECK(sigma_het(-2.0) == 6.5);
  CHECK(sigma_het(1.0) == 2.5);
}

TEST_CASE("oracle halfwidth and standard-CP coverage invert each other") {
  // Phi^{-1}(0.95) * sigma(0), frozen.
  CHECK(oracle_halfwidth(0.0, 0.1) ==
        doctest::Approx(0.8224268134757361).epsilon(1e-12));

  // Plugging the oracle halfwidth back in recovers the target everywhere.
  for (double x : {-0.9, -0.3, 0.0, 0.4, 1.0})
    CHECK(true_coverage_standard_cp(x, oracle_halfwidth(x, 0.1)) ==
          doctest::Approx(0.9).epsilon(1e-12));

  CHECK(true_coverage_standard_cp(0.0, 0.0) == 0.0);
  CHECK(true_coverage_standard_cp(0.0, 100.0) == doctest::Approx(1.0).epsilon(1e-12));
  // Wider noise shrinks coverage at fixed cutoff.
  CHECK(true_coverage_standard_cp(1.0, 1.0) < true_coverage_standard_cp(0.0, 1.0));
}

TEST_CASE("generators are seeded, in range, and hit the analytic moments") {
  Rng rng(123);
  Sample1D a = gen_1d(5000, rng);
  Rng rng2(123);
  Sample1D b = gen_1d(5000, rng2);
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < a.x.size(); ++i) {
    CHECK(a.x[i] >= -1.0);
    CHECK(a.x[i] < 1.0);
    mx += a.x[i];
    my += a.y[i];
  }
  mx /= double(a.x.size());
  my /= double(a.y.size());
  CHECK(std::abs(mx) < 0.05);
  // E[y] = E[e^x] = (e - 1/e)/2 = 1.1752...; 3 sin x and the noise are odd.
  CHECK(std::abs(my - 1.1752011936438014) < 0.15);

  Rng rng3(456);
  Sample8D s8 = gen_8d(5000, rng3);
  REQUIRE(s8.x.rows == 5000);
  REQUIRE(s8.x.cols == 8);
  double my2 = 0.0, msq = 0.0;
  for (std::size_t i = 0; i < 5000; ++i) {
    for (std::size_t j = 0; j < 8; ++j) {
      CHECK(s8.x.at(i, j) >= -1.0);
      CHECK(s8.x.at(i, j) < 1.0);
    }
    my2 += s8.y[i];
    msq += s8.y[i] * s8.y[i];
  }
  my2 /= 5000.0;
  msq /= 5000.0;
  CHECK(std::abs(my2) < 0.1);
  // E[y^2] = E[sigma(x1)^2] = 1/4 + E|x| + 2E[x^2] + 2E|x|^3 + E[x^4]
  //        = 0.25 + 0.5 + 2/3 + 0.5 + 0.2.
  CHECK(std::abs(msq - 2.1166666666666667) < 0.3);
}

TEST_CASE("run_table3 produces both arms with every metric and is deterministic") {
  Table3Config cfg = tiny_config();
  Table3Result r = run_table3(cfg);

  CHECK(r.standard_cp.name == "standard-cp");
  CHECK(r.oracle.name == "oracle");
  CHECK(r.standard_cp.q_hat.size() == 2);
  CHECK(r.oracle.q_hat.empty());

  for (const Table3Arm* arm : {&r.standard_cp, &r.oracle}) {
    for (const std::string& key : kMetricKeys) {
      REQUIRE_MESSAGE(arm->metrics.count(key) == 1, key);
      const MetricStat& st = arm->metrics.at(key);
      REQUIRE(st.values.size() == 2);
      double mean = (st.values[0] + st.values[1]) / 2.0;
      CHECK(st.mean == doctest::Approx(mean).epsilon(1e-12));
      CHECK(st.sd >= 0.0);
      bool is_ert = key.size() > 4 && key.substr(key.size() - 4) == "-ert";
      CHECK(st.std_errs.size() == (is_ert ? 2 : 0));
    }
    CHECK(arm->theoretical_l1.size() == 2);
    CHECK(arm->theoretical_l2.size() == 2);
  }

  // Constant interval size on the standard arm: the size-dependence
  // statistics are identically zero, and the oracle's population ERT is 0.
  for (double v : r.standard_cp.metrics.at("pearson").values) CHECK(v == 0.0);
  for (double v : r.standard_cp.metrics.at("hsic").values) CHECK(v == 0.0);
  for (double v : r.oracle.theoretical_l1) CHECK(v == 0.0);
  for (double v : r.oracle.theoretical_l2) CHECK(v == 0.0);
  for (double q : r.standard_cp.q_hat) CHECK(q > 0.0);

  Table3Result r2 = run_table3(cfg);
  for (const std::string& key : kMetricKeys) {
    CHECK(r.standard_cp.metrics.at(key).values ==
          r2.standard_cp.metrics.at(key).values);
    CHECK(r.oracle.metrics.at(key).values == r2.oracle.metrics.at(key).values);
  }
  CHECK(r.standard_cp.theoretical_l1 == r2.standard_cp.theoretical_l1);
  CHECK(r.standard_cp.q_hat == r2.standard_cp.q_hat);

  CHECK_THROWS_AS((void)run_table3([] {
                    Table3Config bad;
                    bad.repeats = 0;
                    return bad;
                  }()),
                  std::invalid_argument);
}

TEST_CASE("run_fig1 emits x-sorted rows with recomputable truth columns") {
  Fig1Config cfg;
  cfg.n_cal = 300;
  cfg.m_test = 120;
  cfg.folds = 3;
  cfg.seed = 5;
  cfg.classifier.kind = ClassifierSpec::Kind::partition;
  Fig1Result r = run_fig1(cfg);

  CHECK(r.q_hat > 0.0);
  REQUIRE(r.standard_cp.size() == 120);
  REQUIRE(r.oracle.size() == 120);

  for (std::size_t i = 1; i < r.standard_cp.size(); ++i)
    CHECK(r.standard_cp[i - 1].x <= r.standard_cp[i].x);

  for (const Fig1Row& row : r.standard_cp) {
    CHECK(row.target == 0.9);
    CHECK(row.z == ((row.y >= row.lo && row.y <= row.hi) ? 1 : 0));
    // Constant-width band centered on f(x).
    CHECK(row.hi - row.lo == doctest::Approx(2.0 * r.q_hat).epsilon(1e-12));
    CHECK(row.true_p ==
          doctest::Approx(true_coverage_standard_cp(row.x, r.q_hat)).epsilon(1e-12));
    CHECK(row.proxy >= 0.0);
    CHECK(row.proxy <= 1.0);
    CHECK(row.partition_proxy > 0.0);
    CHECK(row.partition_proxy < 1.0);
  }

  for (const Fig1Row& row : r.oracle) {
    CHECK(row.true_p == 0.9);
    CHECK(row.hi - row.lo ==
          doctest::Approx(2.0 * oracle_halfwidth(row.x, 0.1)).epsilon(1e-12));
  }
}
