#pragma once
// Heteroskedastic synthetic benchmarks.  The 1-D generator draws
// X ~ U[-1,1], Y | X ~ N(f(X), sigma(X)^2) with f(x) = 3 sin x + e^x and
// sigma(x) = 1/2 + |x| + x^2; the 8-D generator draws X ~ U([-1,1]^8) and
// Y | X ~ N(0, sigma(X_1)^2).  Two prediction-set rules are audited: standard
// split conformal on |Y| (constant-width, marginally valid, conditionally
// broken) and the oracle rule with exact conditional coverage everywhere.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "covaudit/classifiers.hpp"
#include "covaudit/dataset.hpp"
#include "covaudit/matrix.hpp"
#include "covaudit/rng.hpp"

namespace covaudit {

double f_mean_1d(double x);   // 3 sin x + e^x
double sigma_het(double x);   // 0.5 + |x| + x^2  (a standard deviation)

struct Sample1D {
  std::vector<double> x, y;
};
struct Sample8D {
  Matrix x;  // n x 8
  std::vector<double> y;
};

Sample1D gen_1d(std::size_t n, Rng& rng);
Sample8D gen_8d(std::size_t n, Rng& rng);

// Oracle interval half-width Phi^{-1}(1 - alpha/2) * sigma(x1).
double oracle_halfwidth(double x1, double alpha);

// True conditional coverage of the standard-CP set {|y| <= q_hat} in 8-D:
// 2 Phi(q_hat / sigma(x1)) - 1.
double true_coverage_standard_cp(double x1, double q_hat);

struct Table3Config {
  std::size_t n_cal = 3000;
  std::size_t m_test = 1500;
  double alpha = 0.1;
  int repeats = 10;
  std::size_t mc_samples = 300000;  // draws for the theoretical ERT references
  std::uint64_t seed = 0;
  ClassifierSpec classifier;        // defaults to GBDT
  int folds = 5;
  int wsc_directions = 1000;
  double wsc_delta = 0.25;
};

struct MetricStat {
  double mean = 0.0;
  double sd = 0.0;                // across repeats (0 with one repeat)
  std::vector<double> values;     // one per repeat
  std::vector<double> std_errs;   // per-repeat within-run SE (ERT metrics only)
};

struct Table3Arm {
  std::string name;  // "standard-cp" or "oracle"
  std::map<std::string, MetricStat> metrics;
  // Monte-Carlo population ERT of this arm's rule, one value per repeat
  // (the standard-CP rule changes with the calibrated cutoff).
  std::vector<double> theoretical_l1, theoretical_l2;
  std::vector<double> q_hat;  // per repeat; empty for the oracle arm
};

struct Table3Result {
  Table3Config config;
  Table3Arm standard_cp;
  Table3Arm oracle;
};

Table3Result run_table3(const Table3Config& cfg);

// 1-D coverage curves mirroring the two-panel view: per test point, the set,
// the coverage indicator, the cross-fitted classifier proxy, a partition-wise
// proxy and the true conditional coverage.
struct Fig1Row {
  double x = 0.0, y = 0.0;
  int z = 0;
  double lo = 0.0, hi = 0.0;
  double proxy = 0.0;            // out-of-fold classifier estimate of p(x)
  double partition_proxy = 0.0;  // same via the partition classifier
  double true_p = 0.0;
  double target = 0.0;
};

struct Fig1Config {
  std::size_t n_cal = 3000;
  std::size_t m_test = 1500;
  double alpha = 0.1;
  std::uint64_t seed = 0;
  ClassifierSpec classifier;
  int folds = 5;
};

struct Fig1Result {
  double q_hat = 0.0;                 // standard-CP cutoff on |y - f(x)|
  std::vector<Fig1Row> standard_cp;   // sorted by x
  std::vector<Fig1Row> oracle;
};

Fig1Result run_fig1(const Fig1Config& cfg);

}  // namespace covaudit
