#include "covaudit/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace covaudit {

namespace {

using nlohmann::ordered_json;

// JSON has no infinity; represent non-finite values as strings.
ordered_json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::string csv_num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ordered_json classifier_json(const ClassifierSpec& spec) {
  ordered_json j;
  j["kind"] = classifier_kind_name(spec.kind);
  switch (spec.kind) {
    case ClassifierSpec::Kind::constant:
      j["value"] = num(spec.constant_value);
      break;
    case ClassifierSpec::Kind::partition:
      j["clusters"] = spec.partition_clusters;  // 0 = fourth-root rule
      break;
    case ClassifierSpec::Kind::forest:
      j["trees"] = spec.forest_trees;
      break;
    case ClassifierSpec::Kind::gbdt:
      j["max_rounds"] = spec.gbdt_max_rounds;
      j["max_leaves"] = spec.gbdt_max_leaves;
      j["learning_rate"] = spec.gbdt_learning_rate;
      j["min_leaf"] = spec.gbdt_min_leaf;
      j["max_bins"] = spec.gbdt_max_bins;
      j["patience"] = spec.gbdt_patience;
      j["holdout_frac"] = spec.gbdt_holdout_frac;
      break;
  }
  return j;
}

ordered_json evaluate_report_json(std::uint64_t seed, double alpha, int folds,
                                  const ClassifierSpec& spec, std::size_t m,
                                  const std::vector<MetricResult>& metrics,
                                  const std::vector<std::string>& warnings) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["seed"] = seed;
  j["alpha"] = alpha;
  j["folds"] = folds;
  j["classifier"] = classifier_json(spec);
  j["rows"] = m;
  ordered_json jm = ordered_json::object();
  for (const MetricResult& r : metrics) {
    ordered_json e;
    e["value"] = num(r.value);
    if (r.is_ert) {
      e["std_err"] = num(r.ert.std_err);
      e["pooled_mean"] = num(r.ert.pooled_mean);
      e["over"] = num(r.ert.over);
      e["under"] = num(r.ert.under);
      ordered_json pf = ordered_json::array();
      for (double v : r.ert.per_fold) pf.push_back(num(v));
      e["per_fold"] = pf;
    }
    if (!r.options.empty()) e["options"] = r.options;
    if (!r.warnings.empty()) e["warnings"] = r.warnings;
    jm[r.name] = e;
  }
  j["metrics"] = jm;
  if (!warnings.empty()) j["warnings"] = warnings;
  return j;
}

std::string render_metric_table(const std::vector<MetricResult>& metrics) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-12s %12s %12s %12s %12s\n", "metric",
                "value", "std_err", "over", "under");
  out << line;
  for (const MetricResult& r : metrics) {
    if (r.is_ert) {
      std::snprintf(line, sizeof(line), "%-12s %12.6f %12.6f %12.6f %12.6f\n",
                    r.name.c_str(), r.value, r.ert.std_err, r.ert.over,
                    r.ert.under);
    } else {
      std::snprintf(line, sizeof(line), "%-12s %12.6f %12s %12s %12s\n",
                    r.name.c_str(), r.value, "-", "-", "-");
    }
    out << line;
  }
  return out.str();
}

namespace {

ordered_json arm_json(const Table3Arm& arm) {
  ordered_json j;
  j["name"] = arm.name;
  ordered_json jm = ordered_json::object();
  for (const auto& [name, st] : arm.metrics) {
    ordered_json e;
    e["mean"] = num(st.mean);
    e["sd"] = num(st.sd);
    ordered_json vals = ordered_json::array();
    for (double v : st.values) vals.push_back(num(v));
    e["values"] = vals;
    if (!st.std_errs.empty()) {
      ordered_json ses = ordered_json::array();
      for (double v : st.std_errs) ses.push_back(num(v));
      e["std_errs"] = ses;
    }
    jm[name] = e;
  }
  j["metrics"] = jm;
  auto arr = [](const std::vector<double>& v) {
    ordered_json a = ordered_json::array();
    for (double x : v) a.push_back(num(x));
    return a;
  };
  j["theoretical_l1"] = arr(arm.theoretical_l1);
  j["theoretical_l2"] = arr(arm.theoretical_l2);
  if (!arm.q_hat.empty()) j["q_hat"] = arr(arm.q_hat);
  return j;
}

}  // namespace

ordered_json table3_json(const Table3Result& res) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["experiment"] = "table3";
  ordered_json cfg;
  cfg["n_cal"] = res.config.n_cal;
  cfg["m_test"] = res.config.m_test;
  cfg["alpha"] = res.config.alpha;
  cfg["repeats"] = res.config.repeats;
  cfg["mc_samples"] = res.config.mc_samples;
  cfg["seed"] = res.config.seed;
  cfg["folds"] = res.config.folds;
  cfg["wsc_directions"] = res.config.wsc_directions;
  cfg["wsc_delta"] = res.config.wsc_delta;
  cfg["classifier"] = classifier_json(res.config.classifier);
  j["config"] = cfg;
  j["arms"] = ordered_json::array({arm_json(res.standard_cp), arm_json(res.oracle)});
  return j;
}

std::string table3_csv(const Table3Result& res) {
  std::ostringstream out;
  out << "arm,metric,mean,sd\n";
  for (const Table3Arm* arm : {&res.standard_cp, &res.oracle})
    for (const auto& [name, st] : arm->metrics)
      out << arm->name << ',' << name << ',' << csv_num(st.mean) << ','
          << csv_num(st.sd) << "\n";
  return out.str();
}

std::string fig1_csv(const Fig1Result& res) {
  std::ostringstream out;
  out << "arm,x,y,z,set_lo,set_hi,proxy,partition_proxy,true_p,target\n";
  auto dump = [&](const char* arm, const std::vector<Fig1Row>& rows) {
    for (const Fig1Row& r : rows)
      out << arm << ',' << csv_num(r.x) << ',' << csv_num(r.y) << ',' << r.z
          << ',' << csv_num(r.lo) << ',' << csv_num(r.hi) << ','
          << csv_num(r.proxy) << ',' << csv_num(r.partition_proxy) << ','
          << csv_num(r.true_p) << ',' << csv_num(r.target) << "\n";
  };
  dump("standard-cp", res.standard_cp);
  dump("oracle", res.oracle);
  return out.str();
}

std::string proxy_csv(const ERTReport& rep) {
  std::ostringstream out;
  out << "row,fold,proxy_coverage\n";
  for (std::size_t i = 0; i < rep.proxy.size(); ++i)
    out << i << ',' << rep.fold_of_row[i] << ',' << csv_num(rep.proxy[i]) << "\n";
  return out.str();
}

}  // namespace covaudit
