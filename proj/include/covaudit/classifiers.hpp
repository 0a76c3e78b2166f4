#pragma once
// Coverage classifiers: regressors of the binary coverage indicator z on the
// features, used by the ERT engine as estimates h(x) of the conditional
// coverage p(x).  All fits are deterministic functions of (spec, seed, data);
// the forest parallelizes over trees with per-tree seed substreams, so the
// thread count never changes the result.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "covaudit/dataset.hpp"

namespace covaudit {

struct ClassifierSpec {
  enum class Kind { constant, partition, forest, gbdt };
  Kind kind = Kind::gbdt;
  std::uint64_t seed = 0;

  double constant_value = 0.9;  // constant: the coverage level it returns
  int partition_clusters = 0;   // 0 = fourth-root rule on the training size
  int forest_trees = 300;

  int gbdt_max_rounds = 1000;
  int gbdt_max_leaves = 31;
  double gbdt_learning_rate = 0.1;
  int gbdt_min_leaf = 20;
  int gbdt_max_bins = 255;
  int gbdt_patience = 100;
  double gbdt_holdout_frac = 0.2;
};

ClassifierSpec::Kind classifier_kind_from_name(const std::string& name);
std::string classifier_kind_name(ClassifierSpec::Kind kind);

class TrainedClassifier {
 public:
  virtual ~TrainedClassifier() = default;
  // Predicted coverage probabilities, one per requested row, each in [0,1].
  virtual std::vector<double> predict(
      const Dataset& ds, std::span<const std::size_t> rows) const = 0;
  // Fit-time diagnostics surfaced in reports (e.g. an early-stopping fallback).
  virtual std::vector<std::string> notes() const { return {}; }
};

std::unique_ptr<TrainedClassifier> fit_constant(double value);
std::unique_ptr<TrainedClassifier> fit_partition(const Dataset& ds,
                                                 std::span<const std::size_t> rows,
                                                 int clusters, std::uint64_t seed);
std::unique_ptr<TrainedClassifier> fit_forest(const Dataset& ds,
                                              std::span<const std::size_t> rows,
                                              const ClassifierSpec& spec);
std::unique_ptr<TrainedClassifier> fit_gbdt(const Dataset& ds,
                                            std::span<const std::size_t> rows,
                                            const ClassifierSpec& spec);

// Dispatch on spec.kind.  Throws std::invalid_argument for an empty training
// set.
std::unique_ptr<TrainedClassifier> fit_classifier(const ClassifierSpec& spec,
                                                  const Dataset& ds,
                                                  std::span<const std::size_t> rows);

}  // namespace covaudit
