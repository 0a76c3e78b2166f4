// Bootstrap-aggregated Gini trees.  Each tree draws its own seed substream, so
// the per-tree work can run under OpenMP in any order without changing a bit
// of the output; predictions average leaf positive-fractions in tree order.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "covaudit/classifiers.hpp"
#include "covaudit/rng.hpp"
#include "tree_common.hpp"

namespace covaudit {

namespace {

using detail::Tree;
using detail::TreeNode;

struct SplitChoice {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double child_score = 0.0;  // sum over children of n_c * gini_c (lower is better)
};

// n * gini for a node with `pos` positives out of `n`.
double gini_sum(double pos, double n) {
  if (n <= 0.0) return 0.0;
  double neg = n - pos;
  return n - (pos * pos + neg * neg) / n;
}

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const std::vector<int>& z, int mtry, Rng& rng)
      : x_(x), z_(z), mtry_(mtry), rng_(rng), feat_pool_(x.cols) {
    std::iota(feat_pool_.begin(), feat_pool_.end(), 0);
  }

  Tree build(std::vector<std::size_t> samples) {
    tree_.clear();
    grow(std::move(samples));
    return std::move(tree_);
  }

 private:
  int grow(std::vector<std::size_t> samples) {
    double pos = 0.0;
    for (std::size_t s : samples) pos += double(z_[s]);
    const double n = double(samples.size());

    int id = int(tree_.size());
    tree_.push_back(TreeNode{});
    tree_[std::size_t(id)].value = pos / n;

    if (pos > 0.0 && pos < n) {  // impure: try to split
      SplitChoice best = best_split(samples, pos);
      if (best.found) {
        std::vector<std::size_t> left, right;
        left.reserve(samples.size());
        right.reserve(samples.size());
        for (std::size_t s : samples)
          (x_.at(s, std::size_t(best.feature)) < best.threshold ? left : right)
              .push_back(s);
        samples.clear();
        samples.shrink_to_fit();
        int l = grow(std::move(left));
        int r = grow(std::move(right));
        TreeNode& nd = tree_[std::size_t(id)];
        nd.feature = best.feature;
        nd.threshold = best.threshold;
        nd.left = l;
        nd.right = r;
      }
    }
    return id;
  }

  // Best Gini split over a fresh random feature subset; scans features in
  // ascending index and thresholds in ascending value, keeping the first
  // strict improvement, so ties resolve to the lowest feature / threshold.
  SplitChoice best_split(const std::vector<std::size_t>& samples, double pos) {
    const std::size_t d = x_.cols;
    int mtry = std::min<int>(mtry_, int(d));
    for (int i = 0; i < mtry; ++i) {
      std::size_t j = i + std::size_t(rng_.uniform_int(d - std::size_t(i)));
      std::swap(feat_pool_[std::size_t(i)], feat_pool_[j]);
    }
    std::sort(feat_pool_.begin(), feat_pool_.begin() + mtry);

    SplitChoice best;
    const double n = double(samples.size());
    sorted_.resize(samples.size());
    for (int fi = 0; fi < mtry; ++fi) {
      int f = feat_pool_[std::size_t(fi)];
      for (std::size_t i = 0; i < samples.size(); ++i)
        sorted_[i] = {x_.at(samples[i], std::size_t(f)), z_[samples[i]]};
      std::sort(sorted_.begin(), sorted_.end());

      double lpos = 0.0;
      for (std::size_t i = 1; i < sorted_.size(); ++i) {
        lpos += double(sorted_[i - 1].second);
        if (sorted_[i].first <= sorted_[i - 1].first) continue;  // no boundary
        double ln = double(i), rn = n - ln;
        double score = gini_sum(lpos, ln) + gini_sum(pos - lpos, rn);
        if (!best.found || score < best.child_score) {
          double a = sorted_[i - 1].first, b = sorted_[i].first;
          double thr = a + 0.5 * (b - a);
          if (!(thr > a)) thr = b;  // midpoint rounded onto a: keep sides nonempty
          best.found = true;
          best.feature = f;
          best.threshold = thr;
          best.child_score = score;
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  const std::vector<int>& z_;
  int mtry_;
  Rng& rng_;
  std::vector<int> feat_pool_;
  std::vector<std::pair<double, int>> sorted_;
  Tree tree_;
};

class ForestClassifier final : public TrainedClassifier {
 public:
  ForestClassifier(std::vector<Tree> trees) : trees_(std::move(trees)) {}

  std::vector<double> predict(const Dataset& ds,
                              std::span<const std::size_t> rows) const override {
    Matrix x = detail::raw_features(ds, rows);
    std::vector<double> out(rows.size(), 0.0);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < (long long)rows.size(); ++i) {
      double s = 0.0;
      for (const Tree& t : trees_) s += detail::tree_predict(t, x.row(std::size_t(i)));
      out[std::size_t(i)] = s / double(trees_.size());
    }
    return out;
  }

 private:
  std::vector<Tree> trees_;
};

}  // namespace

std::unique_ptr<TrainedClassifier> fit_forest(const Dataset& ds,
                                              std::span<const std::size_t> rows,
                                              const ClassifierSpec& spec) {
  if (rows.empty()) throw std::invalid_argument("fit_forest: empty training set");
  if (spec.forest_trees < 1)
    throw std::invalid_argument("fit_forest: needs at least one tree");

  Matrix x = detail::raw_features(ds, rows);
  std::vector<int> z(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) z[i] = ds.z[rows[i]];

  const std::size_t n = rows.size();
  const int mtry = int(std::ceil(std::sqrt(double(ds.features.size()))));
  std::vector<Tree> trees(std::size_t(spec.forest_trees));

#pragma omp parallel for schedule(dynamic)
  for (long long t = 0; t < (long long)spec.forest_trees; ++t) {
    Rng rng(substream(spec.seed, "forest-tree", std::uint64_t(t)));
    std::vector<std::size_t> boot(n);
    for (std::size_t i = 0; i < n; ++i) boot[i] = std::size_t(rng.uniform_int(n));
    TreeBuilder builder(x, z, mtry, rng);
    trees[std::size_t(t)] = builder.build(std::move(boot));
  }
  return std::make_unique<ForestClassifier>(std::move(trees));
}

}  // namespace covaudit
