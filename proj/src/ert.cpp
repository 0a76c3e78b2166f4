#include "covaudit/ert.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "covaudit/rng.hpp"

namespace covaudit {

namespace {

// Forest leaves can be exactly 0 or 1; under an unbounded score (positive
// clamp, i.e. log-loss) predictions are pulled to [1e-4, 1-1e-4] before
// scoring so a single pure leaf cannot dominate the estimate.
constexpr double kForestUnboundedClamp = 1e-4;

std::vector<double> row_targets(const Dataset& ds, double alpha) {
  std::vector<double> t(ds.m());
  if (ds.has_alpha_row()) {
    for (std::size_t i = 0; i < ds.m(); ++i) t[i] = 1.0 - ds.alpha_row[i];
  } else {
    std::fill(t.begin(), t.end(), 1.0 - alpha);
  }
  return t;
}

// Lexicographic (features..., z) order.  Fitting on canonically ordered rows
// makes every classifier a function of the training multiset, so shuffling
// rows within folds cannot move the estimate.
void canonical_order(const Dataset& ds, std::vector<std::size_t>& rows) {
  std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
    for (std::size_t j = 0; j < ds.features.size(); ++j) {
      double va = ds.feature_value(j, a), vb = ds.feature_value(j, b);
      if (va != vb) return va < vb;
    }
    return ds.z[a] < ds.z[b];
  });
}

struct Aggregate {
  double value = 0.0, std_err = 0.0, pooled = 0.0;
  std::vector<double> per_fold;
};

Aggregate aggregate_terms(const std::vector<double>& terms,
                          const std::vector<int>& fold_of_row, int k) {
  Aggregate agg;
  std::vector<double> sums(std::size_t(k), 0.0);
  std::vector<std::size_t> counts(std::size_t(k), 0);
  double total = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    sums[std::size_t(fold_of_row[i])] += terms[i];
    ++counts[std::size_t(fold_of_row[i])];
    total += terms[i];
  }
  agg.per_fold.resize(std::size_t(k));
  for (int f = 0; f < k; ++f)
    agg.per_fold[std::size_t(f)] = sums[std::size_t(f)] / double(counts[std::size_t(f)]);
  for (double v : agg.per_fold) agg.value += v;
  agg.value /= double(k);

  const double m = double(terms.size());
  agg.pooled = total / m;
  double ss = 0.0;
  for (double t : terms) {
    double d = t - agg.pooled;
    ss += d * d;
  }
  agg.std_err = m > 1.0 ? std::sqrt(ss / (m - 1.0)) / std::sqrt(m) : 0.0;
  return agg;
}

}  // namespace

std::vector<double> ert_terms(const ProperScore& score,
                              const std::vector<double>& h,
                              const std::vector<int>& z,
                              const std::vector<double>& targets) {
  if (h.size() != z.size() || z.size() != targets.size())
    throw std::invalid_argument("ert_terms: length mismatch");
  std::vector<double> terms(h.size());
  for (std::size_t i = 0; i < h.size(); ++i)
    terms[i] = score.eval(targets[i], z[i], targets[i]) -
               score.eval(h[i], z[i], targets[i]);
  return terms;
}

ERTReport ert_kfold(const Dataset& ds, const ClassifierSpec& spec,
                    const ProperScore& score, double alpha, int folds,
                    std::uint64_t seed) {
  FoldAssignment fa = make_folds(ds.m(), folds, substream(seed, "folds"));
  return ert_kfold(ds, spec, score, alpha, fa, seed);
}

ERTReport ert_kfold(const Dataset& ds, const ClassifierSpec& spec,
                    const ProperScore& score, double alpha,
                    const FoldAssignment& folds, std::uint64_t seed) {
  return ert_kfold_multi(ds, spec, {score}, alpha, folds, seed)[0];
}

std::vector<ERTReport> ert_kfold_multi(const Dataset& ds,
                                       const ClassifierSpec& spec,
                                       const std::vector<ProperScore>& scores,
                                       double alpha,
                                       const FoldAssignment& folds,
                                       std::uint64_t seed) {
  const std::size_t m = ds.m();
  const int k = folds.k;
  if (k < 2) throw std::invalid_argument("ert_kfold: needs at least 2 folds");
  if (std::size_t(k) > m) throw std::invalid_argument("ert_kfold: more folds than rows");
  if (folds.fold_of_row.size() != m)
    throw std::invalid_argument("ert_kfold: fold assignment does not match dataset");
  if (!ds.has_alpha_row() && !(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("ert_kfold: alpha must lie in (0,1)");

  std::vector<std::string> fit_warnings;
  bool all0 = true, all1 = true;
  for (int zi : ds.z) (zi ? all0 : all1) = false;
  if (all0 || all1)
    fit_warnings.push_back("degenerate coverage indicators: every z is " +
                           std::string(all1 ? "1" : "0"));

  std::vector<double> targets = row_targets(ds, alpha);
  std::vector<double> proxy(m, 0.0);
  std::vector<std::vector<std::string>> fold_notes{std::size_t(k)};
  std::exception_ptr fold_error;

#pragma omp parallel for schedule(dynamic)
  for (int f = 0; f < k; ++f) {
    try {
      std::vector<std::size_t> train = folds.rows_not_in_fold(f);
      std::vector<std::size_t> eval = folds.rows_in_fold(f);
      canonical_order(ds, train);

      ClassifierSpec fold_spec = spec;
      fold_spec.seed = substream(seed, "ert-fit", std::uint64_t(f));
      if (fold_spec.kind == ClassifierSpec::Kind::constant)
        fold_spec.constant_value = 1.0 - alpha;

      auto model = fit_classifier(fold_spec, ds, train);
      std::vector<double> h = model->predict(ds, eval);
      for (std::size_t i = 0; i < eval.size(); ++i) proxy[eval[i]] = h[i];
      fold_notes[std::size_t(f)] = model->notes();
    } catch (const std::exception& e) {
      auto tagged = std::make_exception_ptr(std::runtime_error(
          "ert_kfold fold " + std::to_string(f) + ": " + e.what()));
#pragma omp critical
      if (!fold_error) fold_error = tagged;
    }
  }
  if (fold_error) std::rethrow_exception(fold_error);

  for (const auto& notes : fold_notes)
    for (const std::string& n : notes)
      if (std::find(fit_warnings.begin(), fit_warnings.end(), n) == fit_warnings.end())
        fit_warnings.push_back(n);

  std::vector<ERTReport> reports;
  for (const ProperScore& score : scores) {
    ERTReport rep;
    rep.score_name = score.name;
    rep.fold_of_row = folds.fold_of_row;
    rep.proxy = proxy;
    rep.warnings = fit_warnings;

    std::vector<double> h_eval = proxy;
    if (spec.kind == ClassifierSpec::Kind::forest && score.clamp > 0.0)
      for (double& v : h_eval)
        v = std::clamp(v, kForestUnboundedClamp, 1.0 - kForestUnboundedClamp);

    Aggregate agg =
        aggregate_terms(ert_terms(score, h_eval, ds.z, targets),
                        folds.fold_of_row, k);
    rep.value = agg.value;
    rep.std_err = agg.std_err;
    rep.pooled_mean = agg.pooled;
    rep.per_fold = agg.per_fold;

    SplitScores split = split_over_under(score);
    rep.over = aggregate_terms(ert_terms(split.over, h_eval, ds.z, targets),
                               folds.fold_of_row, k)
                   .value;
    rep.under = aggregate_terms(ert_terms(split.under, h_eval, ds.z, targets),
                                folds.fold_of_row, k)
                    .value;
    reports.push_back(std::move(rep));
  }
  return reports;
}

double ert_oracle(const ProperScore& score, double target,
                  const std::vector<double>& p_samples) {
  if (p_samples.empty())
    throw std::invalid_argument("ert_oracle: no samples");
  double sum = 0.0;
  for (double p : p_samples) sum += divergence(score, target, p, target);
  return sum / double(p_samples.size());
}

}  // namespace covaudit
