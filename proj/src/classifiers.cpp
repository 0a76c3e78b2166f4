#include "covaudit/classifiers.hpp"

#include <stdexcept>

#include "covaudit/kmeans.hpp"
#include "covaudit/standardize.hpp"

namespace covaudit {

ClassifierSpec::Kind classifier_kind_from_name(const std::string& name) {
  if (name == "constant") return ClassifierSpec::Kind::constant;
  if (name == "partition") return ClassifierSpec::Kind::partition;
  if (name == "forest") return ClassifierSpec::Kind::forest;
  if (name == "gbdt") return ClassifierSpec::Kind::gbdt;
  throw std::invalid_argument("unknown classifier '" + name + "'");
}

std::string classifier_kind_name(ClassifierSpec::Kind kind) {
  switch (kind) {
    case ClassifierSpec::Kind::constant: return "constant";
    case ClassifierSpec::Kind::partition: return "partition";
    case ClassifierSpec::Kind::forest: return "forest";
    case ClassifierSpec::Kind::gbdt: return "gbdt";
  }
  return "?";
}

namespace {

class ConstantClassifier final : public TrainedClassifier {
 public:
  explicit ConstantClassifier(double v) : value_(v) {}
  std::vector<double> predict(const Dataset&,
                              std::span<const std::size_t> rows) const override {
    return std::vector<double>(rows.size(), value_);
  }

 private:
  double value_;
};

// k-means cells over the standardized one-hot design; each cell predicts its
// Laplace-smoothed coverage rate (sum z + 1) / (count + 2).
class PartitionClassifier final : public TrainedClassifier {
 public:
  PartitionClassifier(Standardizer st, Matrix centroids,
                      std::vector<double> probs)
      : st_(std::move(st)),
        centroids_(std::move(centroids)),
        probs_(std::move(probs)) {}

  std::vector<double> predict(const Dataset& ds,
                              std::span<const std::size_t> rows) const override {
    Matrix x = st_.transform(ds, rows);
    std::vector<double> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      out[i] = probs_[std::size_t(nearest_centroid(centroids_, x.row(i)))];
    return out;
  }

 private:
  Standardizer st_;
  Matrix centroids_;
  std::vector<double> probs_;
};

}  // namespace

std::unique_ptr<TrainedClassifier> fit_constant(double value) {
  if (!(value >= 0.0 && value <= 1.0))
    throw std::invalid_argument("fit_constant: value must lie in [0,1]");
  return std::make_unique<ConstantClassifier>(value);
}

std::unique_ptr<TrainedClassifier> fit_partition(const Dataset& ds,
                                                 std::span<const std::size_t> rows,
                                                 int clusters,
                                                 std::uint64_t seed) {
  if (rows.empty()) throw std::invalid_argument("fit_partition: empty training set");
  int k = clusters > 0 ? clusters : fourth_root_clusters(rows.size());
  if (std::size_t(k) > rows.size()) k = int(rows.size());

  Standardizer st = Standardizer::fit(ds, rows);
  Matrix x = st.transform(ds, rows);
  KMeansResult km = kmeans(x, k, seed);

  std::vector<double> pos(std::size_t(k), 0.0), cnt(std::size_t(k), 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::size_t c = std::size_t(km.assignment[i]);
    pos[c] += double(ds.z[rows[i]]);
    cnt[c] += 1.0;
  }
  std::vector<double> probs(std::size_t(k), 0.0);
  for (std::size_t c = 0; c < std::size_t(k); ++c)
    probs[c] = (pos[c] + 1.0) / (cnt[c] + 2.0);

  return std::make_unique<PartitionClassifier>(std::move(st),
                                               std::move(km.centroids),
                                               std::move(probs));
}

std::unique_ptr<TrainedClassifier> fit_classifier(const ClassifierSpec& spec,
                                                  const Dataset& ds,
                                                  std::span<const std::size_t> rows) {
  if (rows.empty() && spec.kind != ClassifierSpec::Kind::constant)
    throw std::invalid_argument("fit_classifier: empty training set");
  switch (spec.kind) {
    case ClassifierSpec::Kind::constant:
      return fit_constant(spec.constant_value);
    case ClassifierSpec::Kind::partition:
      return fit_partition(ds, rows, spec.partition_clusters, spec.seed);
    case ClassifierSpec::Kind::forest:
      return fit_forest(ds, rows, spec);
    case ClassifierSpec::Kind::gbdt:
      return fit_gbdt(ds, rows, spec);
  }
  throw std::invalid_argument("fit_classifier: bad kind");
}

}  // namespace covaudit
