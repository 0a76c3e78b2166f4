#include "covaudit/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace covaudit {

ConformalCalibration conformal_quantile(const std::vector<double>& scores,
                                        double alpha) {
  if (scores.empty())
    throw std::invalid_argument("conformal_quantile: empty calibration set");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("conformal_quantile: alpha must lie in (0,1)");

  ConformalCalibration cal;
  cal.n = scores.size();
  cal.alpha = alpha;
  std::size_t k =
      std::size_t(std::ceil((1.0 - alpha) * double(scores.size() + 1)));
  if (k > scores.size()) return cal;  // q_hat = +inf

  std::vector<double> sorted = scores;
  std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end());
  cal.q_hat = sorted[k - 1];
  cal.k = k;
  return cal;
}

double abs_residual_score(double y, double y_hat) { return std::abs(y - y_hat); }

bool interval_covers(double y, double y_hat, double q_hat) {
  return std::abs(y - y_hat) <= q_hat;
}

double interval_size(double q_hat) { return 2.0 * q_hat; }

namespace {
void check_simplex(const std::vector<double>& probs, int label,
                   const char* who) {
  if (label < 0 || label >= int(probs.size()))
    throw std::invalid_argument(std::string(who) + ": label out of range");
  double total = 0.0;
  for (double p : probs) {
    if (p < -1e-9 || p > 1.0 + 1e-9)
      throw std::invalid_argument(std::string(who) + ": probability outside [0,1]");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-6)
    throw std::invalid_argument(std::string(who) + ": probabilities do not sum to 1");
}
}  // namespace

double neg_likelihood_score(const std::vector<double>& probs, int label) {
  check_simplex(probs, label, "neg_likelihood_score");
  return -probs[std::size_t(label)];
}

double cumulative_score(const std::vector<double>& probs, int label) {
  check_simplex(probs, label, "cumulative_score");
  std::vector<int> order(probs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return probs[std::size_t(a)] > probs[std::size_t(b)];
  });
  double cum = 0.0;
  for (int cls : order) {
    cum += probs[std::size_t(cls)];
    if (cls == label) return cum;
  }
  return cum;  // unreachable: label is validated above
}

ClassSetResult class_set_covers(const std::vector<double>& class_scores,
                                int label, double q_hat) {
  if (label < 0 || label >= int(class_scores.size()))
    throw std::invalid_argument("class_set_covers: label out of range");
  ClassSetResult res;
  for (std::size_t k = 0; k < class_scores.size(); ++k) {
    if (class_scores[k] <= q_hat) {
      ++res.cardinality;
      if (int(k) == label) res.covered = true;
    }
  }
  return res;
}

}  // namespace covaudit
