#include "covaudit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "covaudit/rng.hpp"

namespace covaudit {

namespace {

[[noreturn]] void fail(const std::string& path, std::size_t line,
                       const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

// One CSV record, honoring double-quoted fields with "" escapes.
std::vector<std::string> split_record(const std::string& line,
                                      const std::string& path,
                                      std::size_t lineno) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == ',') {
      out.push_back(field);
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) fail(path, lineno, "unterminated quoted field");
  out.push_back(field);
  return out;
}

bool parse_double(const std::string& s, double* out) {
  if (s.empty()) return false;
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin + s.size()) return false;
  if (!std::isfinite(v)) return false;
  *out = v;
  return true;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  q += '"';
  return q;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");

  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) fail(path, 1, "empty file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_record(line, path, lineno);

  auto col_index = [&](const std::string& name) -> int {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return int(i);
    return -1;
  };

  int zi = col_index(schema.z_col);
  if (zi < 0) throw std::runtime_error(path + ": missing z column '" + schema.z_col + "'");
  int yi = -1, si = -1, ai = -1;
  if (!schema.y_col.empty()) {
    yi = col_index(schema.y_col);
    if (yi < 0) throw std::runtime_error(path + ": missing y column '" + schema.y_col + "'");
  }
  if (!schema.size_col.empty()) {
    si = col_index(schema.size_col);
    if (si < 0) throw std::runtime_error(path + ": missing set-size column '" + schema.size_col + "'");
  }
  if (!schema.alpha_col.empty()) {
    ai = col_index(schema.alpha_col);
    if (ai < 0) throw std::runtime_error(path + ": missing alpha column '" + schema.alpha_col + "'");
  }

  std::vector<int> feature_cols;
  for (int i = 0; i < int(header.size()); ++i)
    if (i != zi && i != yi && i != si && i != ai) feature_cols.push_back(i);

  std::vector<std::vector<std::string>> cells(header.size());
  std::size_t m = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == EOF) break;  // trailing newline
    std::vector<std::string> rec = split_record(line, path, lineno);
    if (rec.size() != header.size())
      fail(path, lineno, "ragged row: expected " + std::to_string(header.size()) +
                             " fields, found " + std::to_string(rec.size()));
    for (std::size_t i = 0; i < rec.size(); ++i) {
      if (rec[i].empty())
        fail(path, lineno, "missing value in column '" + header[i] + "'");
      cells[i].push_back(rec[i]);
    }
    ++m;
  }
  if (m == 0) throw std::runtime_error(path + ": no data rows");

  Dataset ds;
  ds.z_name = schema.z_col;

  ds.z.reserve(m);
  for (std::size_t r = 0; r < m; ++r) {
    double v;
    if (!parse_double(cells[zi][r], &v) || (v != 0.0 && v != 1.0))
      fail(path, r + 2, "invalid coverage indicator '" + cells[zi][r] +
                            "' in column '" + schema.z_col + "' (must be 0 or 1)");
    ds.z.push_back(int(v));
  }
  if (yi >= 0) {
    ds.y_name = schema.y_col;
    ds.y.reserve(m);
    for (std::size_t r = 0; r < m; ++r) {
      double v;
      if (!parse_double(cells[yi][r], &v))
        fail(path, r + 2, "invalid y value '" + cells[yi][r] + "'");
      ds.y.push_back(v);
    }
  }
  if (si >= 0) {
    ds.size_name = schema.size_col;
    ds.set_size.reserve(m);
    for (std::size_t r = 0; r < m; ++r) {
      double v;
      if (!parse_double(cells[si][r], &v) || v < 0.0)
        fail(path, r + 2, "invalid set size '" + cells[si][r] + "' (must be a nonnegative real)");
      ds.set_size.push_back(v);
    }
  }
  if (ai >= 0) {
    ds.alpha_name = schema.alpha_col;
    ds.alpha_row.reserve(m);
    for (std::size_t r = 0; r < m; ++r) {
      double v;
      if (!parse_double(cells[ai][r], &v) || v <= 0.0 || v >= 1.0)
        fail(path, r + 2, "invalid alpha '" + cells[ai][r] + "' (must lie in (0,1))");
      ds.alpha_row.push_back(v);
    }
  }

  for (int ci : feature_cols) {
    FeatureColumn col;
    col.name = header[ci];
    bool numeric = !schema.force_categorical.count(col.name);
    std::vector<double> vals(m);
    if (numeric) {
      for (std::size_t r = 0; r < m; ++r) {
        if (!parse_double(cells[ci][r], &vals[r])) {
          numeric = false;
          break;
        }
      }
    }
    if (numeric) {
      col.numeric = std::move(vals);
    } else {
      col.is_categorical = true;
      std::map<std::string, int> dict;
      col.codes.reserve(m);
      for (std::size_t r = 0; r < m; ++r) {
        const std::string& s = cells[ci][r];
        auto it = dict.find(s);
        if (it == dict.end()) {
          it = dict.emplace(s, int(col.labels.size())).first;
          col.labels.push_back(s);
        }
        col.codes.push_back(it->second);
      }
    }
    ds.features.push_back(std::move(col));
  }
  return ds;
}

void write_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open file for writing");

  std::vector<std::string> names;
  for (const auto& f : ds.features) names.push_back(f.name);
  names.push_back(ds.z_name);
  if (ds.has_y()) names.push_back(ds.y_name);
  if (ds.has_set_size()) names.push_back(ds.size_name);
  if (ds.has_alpha_row()) names.push_back(ds.alpha_name);
  for (std::size_t i = 0; i < names.size(); ++i)
    out << (i ? "," : "") << quote_if_needed(names[i]);
  out << "\n";

  for (std::size_t r = 0; r < ds.m(); ++r) {
    std::string row;
    for (const auto& f : ds.features) {
      row += f.is_categorical ? quote_if_needed(f.labels[f.codes[r]])
                              : format_double(f.numeric[r]);
      row += ',';
    }
    row += std::to_string(ds.z[r]);
    if (ds.has_y()) row += ',' + format_double(ds.y[r]);
    if (ds.has_set_size()) row += ',' + format_double(ds.set_size[r]);
    if (ds.has_alpha_row()) row += ',' + format_double(ds.alpha_row[r]);
    out << row << "\n";
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

std::vector<std::size_t> FoldAssignment::rows_in_fold(int fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < fold_of_row.size(); ++i)
    if (fold_of_row[i] == fold) rows.push_back(i);
  return rows;
}

std::vector<std::size_t> FoldAssignment::rows_not_in_fold(int fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < fold_of_row.size(); ++i)
    if (fold_of_row[i] != fold) rows.push_back(i);
  return rows;
}

FoldAssignment make_folds(std::size_t m, int k, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("make_folds: k must be >= 1");
  if (std::size_t(k) > m)
    throw std::invalid_argument("make_folds: k exceeds the number of rows");

  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(perm);

  FoldAssignment fa;
  fa.k = k;
  fa.seed = seed;
  fa.fold_of_row.assign(m, -1);
  std::size_t base = m / std::size_t(k), extra = m % std::size_t(k);
  std::size_t pos = 0;
  for (int f = 0; f < k; ++f) {
    std::size_t len = base + (std::size_t(f) < extra ? 1 : 0);
    for (std::size_t i = 0; i < len; ++i) fa.fold_of_row[perm[pos++]] = f;
  }
  return fa;
}

}  // namespace covaudit
