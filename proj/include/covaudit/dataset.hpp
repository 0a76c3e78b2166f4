#pragma once
// Tabular audit data: feature columns (numeric or categorical), the binary
// coverage indicator z, and optional y / set-size / per-row-miscoverage
// columns.  Loading validates hard: bad rows are errors, never imputed.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace covaudit {

struct FeatureColumn {
  std::string name;
  bool is_categorical = false;
  std::vector<double> numeric;       // filled when numeric
  std::vector<int> codes;            // filled when categorical
  std::vector<std::string> labels;   // category dictionary, first-appearance order
};

struct Dataset {
  std::vector<FeatureColumn> features;
  std::vector<int> z;                // coverage indicators, each 0 or 1
  std::vector<double> y;             // empty when the column is absent
  std::vector<double> set_size;      // empty when absent; nonnegative
  std::vector<double> alpha_row;     // empty when absent; each in (0,1)

  // Column names preserved for round-tripping.
  std::string z_name = "z";
  std::string y_name = "y";
  std::string size_name = "set_size";
  std::string alpha_name = "alpha";

  std::size_t m() const { return z.size(); }
  bool has_y() const { return !y.empty(); }
  bool has_set_size() const { return !set_size.empty(); }
  bool has_alpha_row() const { return !alpha_row.empty(); }

  // Raw feature value as a double (categorical columns expose their code).
  double feature_value(std::size_t col, std::size_t row) const {
    const FeatureColumn& f = features[col];
    return f.is_categorical ? double(f.codes[row]) : f.numeric[row];
  }
};

struct CsvSchema {
  std::string z_col = "z";
  std::string y_col;      // empty = not expected
  std::string size_col;   // empty = not expected
  std::string alpha_col;  // empty = not expected
  std::set<std::string> force_categorical;  // override numeric inference
};

// Parses a headered CSV.  Every named role column must exist; all remaining
// columns become features.  A feature column is numeric iff every cell parses
// completely as a finite double and it is not listed in force_categorical.
// Throws std::runtime_error with a one-line diagnostic on any malformed input.
Dataset load_csv(const std::string& path, const CsvSchema& schema);

// Inverse of load_csv up to the original file's formatting: writing and
// re-loading reproduces the Dataset exactly.
void write_csv(const Dataset& ds, const std::string& path);

struct FoldAssignment {
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<int> fold_of_row;

  std::vector<std::size_t> rows_in_fold(int fold) const;
  std::vector<std::size_t> rows_not_in_fold(int fold) const;
};

// Random equal split: a seeded permutation chopped into k blocks whose sizes
// differ by at most one (the first m%k blocks take the extra row).
FoldAssignment make_folds(std::size_t m, int k, std::uint64_t seed);

}  // namespace covaudit
