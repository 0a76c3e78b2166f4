#pragma once
// Report assembly.  JSON reports carry a schema_version plus everything needed
// to reproduce the run byte-for-byte (seed, classifier spec, fold count,
// per-metric options); CSV outputs are plot-ready long tables.  Nothing here
// writes wall-clock time or hostnames: identical runs must serialize
// identically.

#include <string>
#include <vector>

#include <json.hpp>

#include "covaudit/classifiers.hpp"
#include "covaudit/ert.hpp"
#include "covaudit/synthetic.hpp"

namespace covaudit {

inline constexpr int kReportSchemaVersion = 1;

struct MetricResult {
  std::string name;
  double value = 0.0;
  bool is_ert = false;
  ERTReport ert;                       // populated when is_ert
  nlohmann::ordered_json options;      // per-metric options echo
  std::vector<std::string> warnings;
};

nlohmann::ordered_json classifier_json(const ClassifierSpec& spec);

nlohmann::ordered_json evaluate_report_json(
    std::uint64_t seed, double alpha, int folds, const ClassifierSpec& spec,
    std::size_t m, const std::vector<MetricResult>& metrics,
    const std::vector<std::string>& warnings);

// Fixed-width human-readable metric table for stdout.
std::string render_metric_table(const std::vector<MetricResult>& metrics);

nlohmann::ordered_json table3_json(const Table3Result& res);
std::string table3_csv(const Table3Result& res);   // arm,metric,mean,sd
std::string fig1_csv(const Fig1Result& res);       // per-point curve rows

// Out-of-fold proxy coverage as CSV (row,fold,proxy_coverage).
std::string proxy_csv(const ERTReport& rep);

}  // namespace covaudit
