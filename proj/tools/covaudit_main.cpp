// covaudit: command-line audits of prediction-set conditional coverage.
//
//   covaudit evaluate  --data audit.csv          ERT + baseline metrics on a CSV
//   covaudit synthetic --experiment table3       built-in heteroskedastic benchmarks
//   covaudit calibrate --scores s.txt --alpha A  split-conformal cutoff
//
// Every subcommand exits 0 on success and 2 on any validation problem, after a
// single-line diagnostic on standard error.  All randomness flows from --seed
// through named substreams, so rerunning a command with the same flags
// reproduces its output files byte for byte.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "covaudit/classifiers.hpp"
#include "covaudit/conformal.hpp"
#include "covaudit/dataset.hpp"
#include "covaudit/ert.hpp"
#include "covaudit/metrics.hpp"
#include "covaudit/parallel.hpp"
#include "covaudit/report.hpp"
#include "covaudit/rng.hpp"
#include "covaudit/scores.hpp"
#include "covaudit/standardize.hpp"
#include "covaudit/synthetic.hpp"

namespace {

using namespace covaudit;

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out.good()) throw std::runtime_error("write failed: " + path);
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateOptions {
  std::string data;
  std::string z_col = "z";
  std::string y_col, size_col, alpha_col;
  std::vector<std::string> categorical;
  double alpha = 0.1;
  std::string metrics = "l1-ert,l2-ert,kl-ert,wcovgap,covgap,fsc,wsc";
  std::string classifier = "gbdt";
  int folds = 5;
  std::uint64_t seed = 0;
  std::string out, proxy_out;
  int groups = 0;  // 0 = fourth-root rule
  int bins = 5;
  double wsc_delta = 0.25;
  int wsc_directions = 1000;
  std::size_t hsic_max_points = 2000;
  int clusters = 0;  // partition classifier; 0 = fourth-root rule
  int trees = 300;   // forest classifier
};

int run_evaluate(const EvaluateOptions& o) {
  CsvSchema schema;
  schema.z_col = o.z_col;
  schema.y_col = o.y_col;
  schema.size_col = o.size_col;
  schema.alpha_col = o.alpha_col;
  schema.force_categorical.insert(o.categorical.begin(), o.categorical.end());
  Dataset ds = load_csv(o.data, schema);

  ClassifierSpec spec;
  spec.kind = classifier_kind_from_name(o.classifier);
  spec.partition_clusters = o.clusters;
  spec.forest_trees = o.trees;
  spec.constant_value = 1.0 - o.alpha;

  const double target = 1.0 - o.alpha;
  std::vector<std::string> warnings;
  auto skip = [&](const std::string& name, const std::string& why) {
    std::string msg = name + " skipped: " + why;
    warnings.push_back(msg);
    std::cerr << "warning: " << msg << "\n";
  };

  // Requested metric names, deduplicated but in request order.
  std::vector<std::string> names;
  for (const std::string& n : split_list(o.metrics))
    if (std::find(names.begin(), names.end(), n) == names.end())
      names.push_back(n);

  // ERT metrics share one set of cross-fitted predictions.
  std::vector<ProperScore> ert_scores;
  for (const std::string& n : names)
    if (n.ends_with("-ert"))
      ert_scores.push_back(score_by_name(n.substr(0, n.size() - 4)));
  std::vector<ERTReport> ert_reports;
  if (!ert_scores.empty()) {
    FoldAssignment fa =
        make_folds(ds.m(), o.folds, substream(o.seed, "folds"));
    ert_reports = ert_kfold_multi(ds, spec, ert_scores, o.alpha, fa,
                                  substream(o.seed, "ert"));
  }

  // Groupings and the design matrix are shared by several metrics; build lazily.
  std::optional<GroupAssignment> feature_groups;
  auto get_groups = [&]() -> const GroupAssignment& {
    if (!feature_groups)
      feature_groups =
          groups_from_kmeans(ds, o.groups, substream(o.seed, "groups"));
    return *feature_groups;
  };
  std::optional<Matrix> design;
  auto get_design = [&]() -> const Matrix& {
    if (!design) design = one_hot_standardize(ds).x;
    return *design;
  };
  auto group_options = [&]() {
    nlohmann::ordered_json j;
    j["groups"] = get_groups().groups;
    j["source"] = get_groups().source;
    return j;
  };

  std::vector<MetricResult> results;
  std::size_t next_ert = 0;
  for (const std::string& n : names) {
    MetricResult r;
    r.name = n;
    if (n.ends_with("-ert")) {
      r.is_ert = true;
      r.ert = ert_reports[next_ert++];
      r.value = r.ert.value;
      r.warnings = r.ert.warnings;
      r.options["score"] = r.ert.score_name;
      r.options["classifier"] = classifier_kind_name(spec.kind);
      r.options["folds"] = o.folds;
    } else if (n == "covgap" || n == "wcovgap" || n == "fsc") {
      const GroupAssignment& g = get_groups();
      r.value = n == "covgap"    ? covgap(ds.z, g, target)
                : n == "wcovgap" ? wcovgap(ds.z, g, target)
                                 : fsc(ds.z, g);
      r.options = group_options();
    } else if (n == "wsc") {
      r.value = wsc(get_design(), ds.z, o.wsc_delta, o.wsc_directions,
                    substream(o.seed, "wsc"));
      r.options["delta"] = o.wsc_delta;
      r.options["directions"] = o.wsc_directions;
    } else if (n == "ssc") {
      if (!ds.has_set_size()) { skip(n, "no set-size column"); continue; }
      r.value = ssc(ds.z, ds.set_size, o.bins, target);
      r.options["bins"] = o.bins;
    } else if (n == "eoc") {
      if (!ds.has_y()) { skip(n, "no y column"); continue; }
      r.value = eoc(ds.z, ds.y, o.bins, target);
      r.options["bins"] = o.bins;
    } else if (n == "pearson") {
      if (!ds.has_set_size()) { skip(n, "no set-size column"); continue; }
      r.value = pearson_dependence(ds.z, ds.set_size);
    } else if (n == "hsic") {
      if (!ds.has_set_size()) { skip(n, "no set-size column"); continue; }
      r.value = hsic_dependence(ds.z, ds.set_size, o.hsic_max_points,
                                substream(o.seed, "hsic"));
      r.options["max_points"] = o.hsic_max_points;
    } else {
      throw std::runtime_error("unknown metric '" + n + "'");
    }
    results.push_back(std::move(r));
  }

  if (!o.proxy_out.empty() && ert_reports.empty())
    skip("proxy output", "no ERT metric requested");

  std::cout << render_metric_table(results);
  if (!o.out.empty()) {
    nlohmann::ordered_json j = evaluate_report_json(
        o.seed, o.alpha, o.folds, spec, ds.m(), results, warnings);
    write_file(o.out, j.dump(2) + "\n");
  }
  if (!o.proxy_out.empty() && !ert_reports.empty())
    write_file(o.proxy_out, proxy_csv(ert_reports.front()));
  return 0;
}

// ---------------------------------------------------------------------------
// synthetic

struct SyntheticOptions {
  std::string experiment = "table3";
  int repeats = 10;
  std::size_t n_cal = 3000;
  std::size_t m_test = 1500;
  double alpha = 0.1;
  std::uint64_t seed = 0;
  std::size_t mc_samples = 300000;
  std::string classifier = "gbdt";
  int folds = 5;
  int wsc_directions = 1000;
  double wsc_delta = 0.25;
  std::string out_dir;
};

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / double(v.size());
}

int run_synthetic(const SyntheticOptions& o) {
  namespace fs = std::filesystem;
  fs::create_directories(o.out_dir);

  if (o.experiment == "table3") {
    Table3Config cfg;
    cfg.n_cal = o.n_cal;
    cfg.m_test = o.m_test;
    cfg.alpha = o.alpha;
    cfg.repeats = o.repeats;
    cfg.mc_samples = o.mc_samples;
    cfg.seed = o.seed;
    cfg.classifier.kind = classifier_kind_from_name(o.classifier);
    cfg.folds = o.folds;
    cfg.wsc_directions = o.wsc_directions;
    cfg.wsc_delta = o.wsc_delta;

    Table3Result res = run_table3(cfg);
    write_file((fs::path(o.out_dir) / "table3.json").string(),
               table3_json(res).dump(2) + "\n");
    write_file((fs::path(o.out_dir) / "table3.csv").string(), table3_csv(res));

    char line[160];
    std::snprintf(line, sizeof(line), "%-12s %-10s %12s %12s\n", "arm",
                  "metric", "mean", "sd");
    std::cout << line;
    for (const Table3Arm* arm : {&res.standard_cp, &res.oracle}) {
      for (const auto& [name, st] : arm->metrics) {
        std::snprintf(line, sizeof(line), "%-12s %-10s %12.6f %12.6f\n",
                      arm->name.c_str(), name.c_str(), st.mean, st.sd);
        std::cout << line;
      }
      std::snprintf(line, sizeof(line),
                    "%-12s l1/l2 population ERT (mc): %.6f / %.6f\n",
                    arm->name.c_str(), mean_of(arm->theoretical_l1),
                    mean_of(arm->theoretical_l2));
      std::cout << line;
    }
    std::cout << "wrote " << o.out_dir << "/table3.json and table3.csv\n";
  } else {  // fig1
    Fig1Config cfg;
    cfg.n_cal = o.n_cal;
    cfg.m_test = o.m_test;
    cfg.alpha = o.alpha;
    cfg.seed = o.seed;
    cfg.classifier.kind = classifier_kind_from_name(o.classifier);
    cfg.folds = o.folds;

    Fig1Result res = run_fig1(cfg);
    write_file((fs::path(o.out_dir) / "fig1_curve.csv").string(),
               fig1_csv(res));
    char line[160];
    std::snprintf(line, sizeof(line),
                  "q_hat=%.6f rows=%zu wrote %s/fig1_curve.csv\n", res.q_hat,
                  res.standard_cp.size() + res.oracle.size(),
                  o.out_dir.c_str());
    std::cout << line;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// calibrate

int run_calibrate(const std::string& path, double alpha) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<double> scores;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // Trim whitespace; blank lines are fine, anything else must be a number.
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    std::size_t e = line.find_last_not_of(" \t\r");
    std::string cell = line.substr(b, e - b + 1);
    try {
      std::size_t used = 0;
      double v = std::stod(cell, &used);
      if (used != cell.size() || !std::isfinite(v)) throw std::invalid_argument(cell);
      scores.push_back(v);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": not a finite number: '" + cell + "'");
    }
  }
  if (scores.empty()) throw std::runtime_error("no scores in " + path);

  ConformalCalibration cal = conformal_quantile(scores, alpha);
  // With k > n no order statistic exists; report the index that was asked for.
  std::size_t k = cal.k > 0 ? cal.k
                            : std::size_t(std::ceil((1.0 - alpha) *
                                                    double(cal.n + 1)));
  char buf[96];
  if (std::isinf(cal.q_hat))
    std::snprintf(buf, sizeof(buf), "q_hat=inf k=%zu n=%zu\n", k, cal.n);
  else
    std::snprintf(buf, sizeof(buf), "q_hat=%.17g k=%zu n=%zu\n", cal.q_hat, k,
                  cal.n);
  std::cout << buf;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  covaudit::apply_thread_cap();

  CLI::App app{"conditional-coverage audit toolkit"};
  app.require_subcommand(1);

  EvaluateOptions eo;
  CLI::App* ev = app.add_subcommand(
      "evaluate", "audit a CSV of coverage indicators");
  ev->add_option("--data", eo.data, "input CSV path")->required();
  ev->add_option("--z-col", eo.z_col, "coverage indicator column (default z)");
  ev->add_option("--y-col", eo.y_col, "response column (enables eoc)");
  ev->add_option("--size-col", eo.size_col,
                 "set-size column (enables ssc, pearson, hsic)");
  ev->add_option("--alpha-col", eo.alpha_col,
                 "per-row miscoverage column (overrides --alpha per row)");
  ev->add_option("--categorical", eo.categorical,
                 "feature columns to force categorical");
  ev->add_option("--alpha", eo.alpha, "miscoverage level (default 0.1)");
  ev->add_option("--metrics", eo.metrics, "comma-separated metric list");
  ev->add_option("--classifier", eo.classifier, "coverage classifier")
      ->check(CLI::IsMember({"constant", "partition", "forest", "gbdt"}));
  ev->add_option("--folds", eo.folds, "cross-fitting folds (default 5)");
  ev->add_option("--seed", eo.seed, "root RNG seed (default 0)");
  ev->add_option("--out", eo.out, "JSON report path");
  ev->add_option("--proxy-out", eo.proxy_out, "per-row proxy-coverage CSV path");
  ev->add_option("--groups", eo.groups,
                 "k-means group count for covgap/wcovgap/fsc (0 = m^(1/4))");
  ev->add_option("--bins", eo.bins, "quantile bins for ssc/eoc (default 5)");
  ev->add_option("--wsc-delta", eo.wsc_delta, "WSC slab mass (default 0.25)");
  ev->add_option("--wsc-directions", eo.wsc_directions,
                 "WSC direction count (default 1000)");
  ev->add_option("--hsic-max-points", eo.hsic_max_points,
                 "HSIC subsample cap (default 2000)");
  ev->add_option("--clusters", eo.clusters,
                 "partition classifier cells (0 = fourth-root rule)");
  ev->add_option("--trees", eo.trees, "forest classifier trees (default 300)");

  SyntheticOptions so;
  CLI::App* sy = app.add_subcommand(
      "synthetic", "run built-in heteroskedastic benchmarks");
  sy->add_option("--experiment", so.experiment, "table3 or fig1")
      ->check(CLI::IsMember({"table3", "fig1"}));
  sy->add_option("--repeats", so.repeats, "repeats (table3, default 10)");
  sy->add_option("--n-cal", so.n_cal, "calibration set size (default 3000)");
  sy->add_option("--m-test", so.m_test, "audit set size (default 1500)");
  sy->add_option("--alpha", so.alpha, "miscoverage level (default 0.1)");
  sy->add_option("--seed", so.seed, "root RNG seed (default 0)");
  sy->add_option("--mc-samples", so.mc_samples,
                 "Monte-Carlo draws for population ERT references");
  sy->add_option("--classifier", so.classifier, "coverage classifier")
      ->check(CLI::IsMember({"constant", "partition", "forest", "gbdt"}));
  sy->add_option("--folds", so.folds, "cross-fitting folds (default 5)");
  sy->add_option("--wsc-directions", so.wsc_directions, "WSC directions");
  sy->add_option("--wsc-delta", so.wsc_delta, "WSC slab mass");
  sy->add_option("--out-dir", so.out_dir, "output directory")->required();

  std::string cal_scores;
  double cal_alpha = 0.1;
  CLI::App* ca = app.add_subcommand(
      "calibrate", "split-conformal cutoff from a score file");
  ca->add_option("--scores", cal_scores, "file with one score per line")
      ->required();
  ca->add_option("--alpha", cal_alpha, "miscoverage level (default 0.1)");

  try {
    app.parse(argc, argv);
    if (ev->parsed()) return run_evaluate(eo);
    if (sy->parsed()) return run_synthetic(so);
    return run_calibrate(cal_scores, cal_alpha);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);  // prints help or the flag error
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
