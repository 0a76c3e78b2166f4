#pragma once
// Excess risk of target coverage.  The plug-in estimate cross-fits a coverage
// classifier over k random equal folds; each held-out row contributes the term
//   ell(t_i, z_i) - ell(h(x_i), z_i),
// the fold estimate is the fold's mean term, and the reported value is the
// unweighted mean of fold estimates.  Any proper score's estimate lower-bounds
// the population ERT of that score, so a clearly positive value certifies a
// conditional-coverage violation while a small one certifies nothing.

#include <cstdint>
#include <string>
#include <vector>

#include "covaudit/classifiers.hpp"
#include "covaudit/dataset.hpp"
#include "covaudit/scores.hpp"

namespace covaudit {

struct ERTReport {
  std::string score_name;
  double value = 0.0;       // mean of per_fold
  double std_err = 0.0;     // sample sd of all per-row terms / sqrt(m)
  double pooled_mean = 0.0; // mean of all per-row terms (diagnostic)
  double over = 0.0;        // over-coverage half (split score ell+)
  double under = 0.0;       // under-coverage half; over + under == value
  std::vector<double> per_fold;
  std::vector<double> proxy;        // out-of-fold h(x_i), unclamped
  std::vector<int> fold_of_row;
  std::vector<std::string> warnings;
};

// Per-row ERT terms for already-computed predictions; targets holds the
// per-row target coverage level (1 - alpha_i).
std::vector<double> ert_terms(const ProperScore& score,
                              const std::vector<double>& h,
                              const std::vector<int>& z,
                              const std::vector<double>& targets);

// Cross-fitted estimate.  Targets come from the dataset's alpha column when
// present, else from the scalar alpha.  Throws std::invalid_argument for
// folds < 2 or folds > m; degenerate z (all equal) only warns.
ERTReport ert_kfold(const Dataset& ds, const ClassifierSpec& spec,
                    const ProperScore& score, double alpha, int folds,
                    std::uint64_t seed);

// Same estimate on a caller-supplied fold assignment (seed only drives the
// per-fold classifier substreams).
ERTReport ert_kfold(const Dataset& ds, const ClassifierSpec& spec,
                    const ProperScore& score, double alpha,
                    const FoldAssignment& folds, std::uint64_t seed);

// Scores one set of cross-fitted predictions under several proper scores;
// classifier fits are shared, so this equals per-score ert_kfold calls.
std::vector<ERTReport> ert_kfold_multi(const Dataset& ds,
                                       const ClassifierSpec& spec,
                                       const std::vector<ProperScore>& scores,
                                       double alpha,
                                       const FoldAssignment& folds,
                                       std::uint64_t seed);

// Population reference: mean induced divergence d(target, p_i) over samples of
// the true conditional coverage p(X).
double ert_oracle(const ProperScore& score, double target,
                  const std::vector<double>& p_samples);

}  // namespace covaudit
