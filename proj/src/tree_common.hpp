#pragma once
// Shared bits for the tree-based classifiers: a flat binary-tree layout over
// raw feature values (categorical columns contribute their integer codes) and
// the raw feature-matrix gather.

#include <cstddef>
#include <span>
#include <vector>

#include "covaudit/dataset.hpp"
#include "covaudit/matrix.hpp"

namespace covaudit::detail {

struct TreeNode {
  int feature = -1;       // -1 marks a leaf
  double threshold = 0.0; // go left when x[feature] < threshold
  int left = -1;
  int right = -1;
  double value = 0.0;     // leaf payload
};

using Tree = std::vector<TreeNode>;

inline double tree_predict(const Tree& tree, const double* x) {
  int node = 0;
  while (tree[std::size_t(node)].feature >= 0) {
    const TreeNode& n = tree[std::size_t(node)];
    node = x[n.feature] < n.threshold ? n.left : n.right;
  }
  return tree[std::size_t(node)].value;
}

inline Matrix raw_features(const Dataset& ds,
                           std::span<const std::size_t> rows) {
  Matrix x(rows.size(), ds.features.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < ds.features.size(); ++j)
      x.at(i, j) = ds.feature_value(j, rows[i]);
  return x;
}

}  // namespace covaudit::detail
