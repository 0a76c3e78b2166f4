#pragma once
// One-hot + standardization design matrix used by the partition classifier,
// feature-space grouping and WSC projections.  Numeric columns are centered
// and scaled by the population standard deviation (zero-variance columns map
// to all-zeros); categorical columns expand to indicator blocks, and a code
// unseen during fitting maps to an all-zero block.

#include <cstddef>
#include <span>
#include <vector>

#include "covaudit/dataset.hpp"
#include "covaudit/matrix.hpp"

namespace covaudit {

class Standardizer {
 public:
  static Standardizer fit(const Dataset& ds, std::span<const std::size_t> rows);
  Matrix transform(const Dataset& ds, std::span<const std::size_t> rows) const;
  std::size_t out_dim() const { return out_dim_; }

 private:
  struct Col {
    bool categorical = false;
    double mean = 0.0;
    double scale = 1.0;   // population std; 0 marks a degenerate column
    int width = 1;        // number of output columns (dictionary size if categorical)
  };
  std::vector<Col> cols_;
  std::size_t out_dim_ = 0;
};

// Fit on all rows and transform them in one call.
struct DesignMatrix {
  Matrix x;
  Standardizer transform;
};
DesignMatrix one_hot_standardize(const Dataset& ds);

// All row indices of ds, in order.
std::vector<std::size_t> all_rows(const Dataset& ds);

}  // namespace covaudit
