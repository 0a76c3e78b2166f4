#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "covaudit/report.hpp"

using namespace covaudit;
using nlohmann::ordered_json;

namespace {

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("classifier_json echoes only the relevant hyperparameters") {
  ClassifierSpec spec;
  spec.kind = ClassifierSpec::Kind::constant;
  spec.constant_value = 0.9;
  ordered_json c = classifier_json(spec);
  CHECK(c["kind"] == "constant");
  CHECK(c["value"] == 0.9);
  CHECK_FALSE(c.contains("trees"));

  spec.kind = ClassifierSpec::Kind::partition;
  spec.partition_clusters = 4;
  ordered_json p = classifier_json(spec);
  CHECK(p["kind"] == "partition");
  CHECK(p["clusters"] == 4);

  spec.kind = ClassifierSpec::Kind::forest;
  ordered_json f = classifier_json(spec);
  CHECK(f["kind"] == "forest");
  CHECK(f["trees"] == 300);

  spec.kind = ClassifierSpec::Kind::gbdt;
  ordered_json g = classifier_json(spec);
  CHECK(g["kind"] == "gbdt");
  CHECK(g["max_rounds"] == 1000);
  CHECK(g["max_leaves"] == 31);
  CHECK(g["learning_rate"] == 0.1);
  CHECK(g["min_leaf"] == 20);
  CHECK(g["max_bins"] == 255);
  CHECK(g["patience"] == 100);
  CHECK(g["holdout_frac"] == 0.2);
}

TEST_CASE("evaluate report carries schema, config echo and metric blocks") {
  ClassifierSpec spec;
  spec.kind = ClassifierSpec::Kind::partition;

  MetricResult plain;
  plain.name = "covgap";
  plain.value = 0.125;
  plain.options["groups"] = 3;

  MetricResult ert;
  ert.name = "l1-ert";
  ert.value = 0.07;
  ert.is_ert = true;
  ert.ert.std_err = 0.01;
  ert.ert.pooled_mean = 0.069;
  ert.ert.over = 0.02;
  ert.ert.under = 0.05;
  ert.ert.per_fold = {0.06, 0.08};
  ert.warnings = {"degenerate coverage indicators: every z is 1"};

  ordered_json j = evaluate_report_json(42, 0.1, 5, spec, 200, {plain, ert},
                                        {"ssc skipped: no set-size column"});
  CHECK(j["schema_version"] == kReportSchemaVersion);
  CHECK(j["seed"] == 42);
  CHECK(j["alpha"] == 0.1);
  CHECK(j["folds"] == 5);
  CHECK(j["rows"] == 200);
  CHECK(j["classifier"]["kind"] == "partition");

  CHECK(j["metrics"]["covgap"]["value"] == 0.125);
  CHECK(j["metrics"]["covgap"]["options"]["groups"] == 3);
  CHECK_FALSE(j["metrics"]["covgap"].contains("std_err"));

  CHECK(j["metrics"]["l1-ert"]["std_err"] == 0.01);
  CHECK(j["metrics"]["l1-ert"]["over"] == 0.02);
  CHECK(j["metrics"]["l1-ert"]["under"] == 0.05);
  CHECK(j["metrics"]["l1-ert"]["per_fold"].size() == 2);
  CHECK(j["metrics"]["l1-ert"]["warnings"].size() == 1);
  CHECK(j["warnings"][0] == "ssc skipped: no set-size column");

  // Identical inputs serialize identically (no timestamps or addresses).
  ordered_json j2 = evaluate_report_json(42, 0.1, 5, spec, 200, {plain, ert},
                                         {"ssc skipped: no set-size column"});
  CHECK(j.dump(2) == j2.dump(2));
}

TEST_CASE("non-finite values serialize as strings everywhere") {
  MetricResult bad;
  bad.name = "kl-ert";
  bad.is_ert = true;
  bad.value = std::numeric_limits<double>::infinity();
  bad.ert.std_err = std::numeric_limits<double>::quiet_NaN();
  bad.ert.over = -std::numeric_limits<double>::infinity();
  ClassifierSpec spec;
  ordered_json j = evaluate_report_json(0, 0.1, 2, spec, 4, {bad}, {});
  CHECK(j["metrics"]["kl-ert"]["value"] == "inf");
  CHECK(j["metrics"]["kl-ert"]["std_err"] == "nan");
  CHECK(j["metrics"]["kl-ert"]["over"] == "-inf");
  // The dump must be valid JSON (nlohmann would throw on raw inf).
  CHECK_NOTHROW((void)j.dump());
}

TEST_CASE("render_metric_table lines up ERT and plain rows") {
  MetricResult plain;
  plain.name = "fsc";
  plain.value = 0.83;
  MetricResult ert;
  ert.name = "l1-ert";
  ert.value = 0.07;
  ert.is_ert = true;
  std::string table = render_metric_table({plain, ert});
  CHECK(count_lines(table) == 3);  // header + two rows
  CHECK(table.find("metric") != std::string::npos);
  CHECK(table.find("fsc") != std::string::npos);
  CHECK(table.find("l1-ert") != std::string::npos);
  CHECK(table.find("0.830000") != std::string::npos);
}

TEST_CASE("table3 serializations mirror the result structure") {
  Table3Config cfg;
  cfg.n_cal = 50;
  cfg.m_test = 40;
  cfg.repeats = 1;
  cfg.mc_samples = 100;
  cfg.folds = 2;
  cfg.wsc_directions = 5;
  cfg.classifier.kind = ClassifierSpec::Kind::partition;
  cfg.seed = 3;
  Table3Result res = run_table3(cfg);

  ordered_json j = table3_json(res);
  CHECK(j["schema_version"] == kReportSchemaVersion);
  CHECK(j["experiment"] == "table3");
  CHECK(j["config"]["n_cal"] == 50);
  CHECK(j["config"]["classifier"]["kind"] == "partition");
  REQUIRE(j["arms"].size() == 2);
  CHECK(j["arms"][0]["name"] == "standard-cp");
  CHECK(j["arms"][1]["name"] == "oracle");
  CHECK(j["arms"][0]["metrics"].contains("l1-ert"));
  CHECK(j["arms"][0]["metrics"]["l1-ert"]["values"].size() == 1);
  CHECK(j["arms"][0].contains("q_hat"));
  CHECK_FALSE(j["arms"][1].contains("q_hat"));

  std::string csv = table3_csv(res);
  CHECK(csv.rfind("arm,metric,mean,sd\n", 0) == 0);
  CHECK(count_lines(csv) == 1 + 2 * 11);  // header + 11 metrics per arm

  Fig1Config fcfg;
  fcfg.n_cal = 60;
  fcfg.m_test = 30;
  fcfg.folds = 2;
  fcfg.classifier.kind = ClassifierSpec::Kind::partition;
  Fig1Result fig = run_fig1(fcfg);
  std::string fcsv = fig1_csv(fig);
  CHECK(fcsv.rfind("arm,x,y,z,set_lo,set_hi,proxy,partition_proxy,true_p,target\n",
                   0) == 0);
  CHECK(count_lines(fcsv) == 1 + 2 * 30);
}

TEST_CASE("proxy_csv writes one row per audited point") {
  ERTReport rep;
  rep.proxy = {0.5, 0.75};
  rep.fold_of_row = {1, 0};
  std::string csv = proxy_csv(rep);
  CHECK(csv == "row,fold,proxy_coverage\n0,1,0.5\n1,0,0.75\n");
}
