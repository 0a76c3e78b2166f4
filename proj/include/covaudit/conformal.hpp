#pragma once
// Split-conformal calibration on precomputed nonconformity scores, plus the
// standard regression/classification score functions.  The calibrated cutoff
// is the k-th smallest score with k = ceil((1-alpha)(n+1)), or +infinity when
// k > n; a fresh exchangeable score is covered iff it is <= the cutoff, which
// gives marginal coverage in [1-alpha, 1-alpha + 1/(n+1)).

#include <cstddef>
#include <limits>
#include <vector>

namespace covaudit {

struct ConformalCalibration {
  double q_hat = std::numeric_limits<double>::infinity();
  std::size_t k = 0;   // order-statistic index (1-based); 0 means +inf cutoff
  std::size_t n = 0;   // calibration set size
  double alpha = 0.0;
};

// Calibrates on the given scores.  Throws std::invalid_argument when scores
// is empty or alpha lies outside (0,1).
ConformalCalibration conformal_quantile(const std::vector<double>& scores,
                                        double alpha);

// Regression: absolute residual |y - y_hat|.
double abs_residual_score(double y, double y_hat);

// Interval set {y : |y - y_hat| <= q_hat}: coverage and size (size is
// +infinity when q_hat is).
bool interval_covers(double y, double y_hat, double q_hat);
double interval_size(double q_hat);

// Classification, probabilities over K classes summing to 1 (checked to 1e-6).
// Negative likelihood score: -probs[label].
double neg_likelihood_score(const std::vector<double>& probs, int label);
// Cumulative score: probabilities sorted descending (ties by class index),
// summed through the true label's position.
double cumulative_score(const std::vector<double>& probs, int label);

// Prediction set {k : score(probs, k) <= q_hat} for a per-class score vector;
// empty sets are legal and count as cardinality 0 / not covered.
struct ClassSetResult {
  bool covered = false;
  int cardinality = 0;
};
ClassSetResult class_set_covers(const std::vector<double>& class_scores,
                                int label, double q_hat);

}  // namespace covaudit
