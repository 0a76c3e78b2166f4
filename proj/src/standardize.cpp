#include "covaudit/standardize.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace covaudit {

Standardizer Standardizer::fit(const Dataset& ds,
                               std::span<const std::size_t> rows) {
  if (rows.empty()) throw std::invalid_argument("Standardizer: no rows to fit");
  Standardizer st;
  for (const FeatureColumn& f : ds.features) {
    Col c;
    if (f.is_categorical) {
      c.categorical = true;
      c.width = int(f.labels.size());
    } else {
      double sum = 0.0;
      for (std::size_t r : rows) sum += f.numeric[r];
      c.mean = sum / double(rows.size());
      double ss = 0.0;
      for (std::size_t r : rows) {
        double d = f.numeric[r] - c.mean;
        ss += d * d;
      }
      c.scale = std::sqrt(ss / double(rows.size()));
    }
    st.out_dim_ += std::size_t(c.width);
    st.cols_.push_back(c);
  }
  return st;
}

Matrix Standardizer::transform(const Dataset& ds,
                               std::span<const std::size_t> rows) const {
  if (cols_.size() != ds.features.size())
    throw std::invalid_argument("Standardizer: column count mismatch");
  Matrix out(rows.size(), out_dim_);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::size_t r = rows[i];
    double* dst = out.row(i);
    std::size_t off = 0;
    for (std::size_t j = 0; j < cols_.size(); ++j) {
      const Col& c = cols_[j];
      const FeatureColumn& f = ds.features[j];
      if (c.categorical) {
        int code = f.codes[r];
        if (code >= 0 && code < c.width) dst[off + std::size_t(code)] = 1.0;
        // unseen code: leave the block all-zero
      } else {
        dst[off] = c.scale > 0.0 ? (f.numeric[r] - c.mean) / c.scale : 0.0;
      }
      off += std::size_t(c.width);
    }
  }
  return out;
}

DesignMatrix one_hot_standardize(const Dataset& ds) {
  std::vector<std::size_t> rows = all_rows(ds);
  DesignMatrix dm;
  dm.transform = Standardizer::fit(ds, rows);
  dm.x = dm.transform.transform(ds, rows);
  return dm;
}

std::vector<std::size_t> all_rows(const Dataset& ds) {
  std::vector<std::size_t> rows(ds.m());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

}  // namespace covaudit
