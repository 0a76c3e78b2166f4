#include "covaudit/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "covaudit/conformal.hpp"
#include "covaudit/ert.hpp"
#include "covaudit/metrics.hpp"
#include "covaudit/normal.hpp"
#include "covaudit/standardize.hpp"

namespace covaudit {

double f_mean_1d(double x) { return 3.0 * std::sin(x) + std::exp(x); }

double sigma_het(double x) { return 0.5 + std::abs(x) + x * x; }

Sample1D gen_1d(std::size_t n, Rng& rng) {
  Sample1D s;
  s.x.resize(n);
  s.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = rng.uniform(-1.0, 1.0);
    s.x[i] = x;
    s.y[i] = f_mean_1d(x) + sigma_het(x) * rng.normal();
  }
  return s;
}

Sample8D gen_8d(std::size_t n, Rng& rng) {
  Sample8D s;
  s.x = Matrix(n, 8);
  s.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < 8; ++j) s.x.at(i, j) = rng.uniform(-1.0, 1.0);
    s.y[i] = sigma_het(s.x.at(i, 0)) * rng.normal();
  }
  return s;
}

double oracle_halfwidth(double x1, double alpha) {
  return normal_quantile(1.0 - alpha / 2.0) * sigma_het(x1);
}

double true_coverage_standard_cp(double x1, double q_hat) {
  return 2.0 * normal_cdf(q_hat / sigma_het(x1)) - 1.0;
}

namespace {

Dataset dataset_from_8d(const Sample8D& s, const std::vector<int>& z,
                        const std::vector<double>& sizes) {
  Dataset ds;
  for (std::size_t j = 0; j < 8; ++j) {
    FeatureColumn col;
    col.name = "x" + std::to_string(j + 1);
    col.numeric.resize(s.y.size());
    for (std::size_t i = 0; i < s.y.size(); ++i) col.numeric[i] = s.x.at(i, j);
    ds.features.push_back(std::move(col));
  }
  ds.z = z;
  ds.y = s.y;
  ds.set_size = sizes;
  return ds;
}

void push_stat(Table3Arm& arm, const std::string& name, double value,
               double std_err = std::numeric_limits<double>::quiet_NaN()) {
  MetricStat& st = arm.metrics[name];
  st.values.push_back(value);
  if (!std::isnan(std_err)) st.std_errs.push_back(std_err);
}

void finalize_stats(Table3Arm& arm) {
  for (auto& [name, st] : arm.metrics) {
    double sum = 0.0;
    for (double v : st.values) sum += v;
    st.mean = sum / double(st.values.size());
    double ss = 0.0;
    for (double v : st.values) ss += (v - st.mean) * (v - st.mean);
    st.sd = st.values.size() > 1
                ? std::sqrt(ss / double(st.values.size() - 1))
                : 0.0;
  }
}

// All baseline metrics plus the ERT family on one audited test set.
void audit_arm(Table3Arm& arm, const Dataset& ds, const Table3Config& cfg,
               std::uint64_t rep_seed) {
  const double target = 1.0 - cfg.alpha;

  GroupAssignment groups =
      groups_from_kmeans(ds, 0, substream(rep_seed, "groups"));
  push_stat(arm, "fsc", fsc(ds.z, groups));
  push_stat(arm, "covgap", covgap(ds.z, groups, target));
  push_stat(arm, "wcovgap", wcovgap(ds.z, groups, target));

  DesignMatrix dm = one_hot_standardize(ds);
  push_stat(arm, "wsc",
            wsc(dm.x, ds.z, cfg.wsc_delta, cfg.wsc_directions,
                substream(rep_seed, "wsc")));
  push_stat(arm, "eoc", eoc(ds.z, ds.y, 5, target));
  push_stat(arm, "ssc", ssc(ds.z, ds.set_size, 5, target));
  push_stat(arm, "pearson", pearson_dependence(ds.z, ds.set_size));
  push_stat(arm, "hsic",
            hsic_dependence(ds.z, ds.set_size, 2000, substream(rep_seed, "hsic")));

  FoldAssignment folds =
      make_folds(ds.m(), cfg.folds, substream(rep_seed, "folds"));
  std::vector<ProperScore> scores = {make_l1(), make_brier(), make_log_loss()};
  std::vector<ERTReport> reps = ert_kfold_multi(ds, cfg.classifier, scores,
                                                cfg.alpha, folds,
                                                substream(rep_seed, "ert"));
  push_stat(arm, "l1-ert", reps[0].value, reps[0].std_err);
  push_stat(arm, "l2-ert", reps[1].value, reps[1].std_err);
  push_stat(arm, "kl-ert", reps[2].value, reps[2].std_err);
}

}  // namespace

Table3Result run_table3(const Table3Config& cfg) {
  if (cfg.repeats < 1) throw std::invalid_argument("run_table3: repeats must be >= 1");
  Table3Result out;
  out.config = cfg;
  out.standard_cp.name = "standard-cp";
  out.oracle.name = "oracle";
  const double target = 1.0 - cfg.alpha;
  ProperScore l1 = make_l1(), l2 = make_brier();

  for (int rep = 0; rep < cfg.repeats; ++rep) {
    const std::uint64_t rep_seed = cfg.seed + std::uint64_t(rep);

    // Standard split conformal on |y|, calibrated on a fresh draw.
    Rng cal_rng(substream(rep_seed, "cal"));
    Sample8D cal = gen_8d(cfg.n_cal, cal_rng);
    std::vector<double> cal_scores(cfg.n_cal);
    for (std::size_t i = 0; i < cfg.n_cal; ++i) cal_scores[i] = std::abs(cal.y[i]);
    ConformalCalibration c = conformal_quantile(cal_scores, cfg.alpha);
    out.standard_cp.q_hat.push_back(c.q_hat);

    Rng test_rng(substream(rep_seed, "test"));
    Sample8D test = gen_8d(cfg.m_test, test_rng);

    std::vector<int> z_std(cfg.m_test), z_ora(cfg.m_test);
    std::vector<double> size_std(cfg.m_test), size_ora(cfg.m_test);
    for (std::size_t i = 0; i < cfg.m_test; ++i) {
      z_std[i] = std::abs(test.y[i]) <= c.q_hat ? 1 : 0;
      size_std[i] = interval_size(c.q_hat);
      double half = oracle_halfwidth(test.x.at(i, 0), cfg.alpha);
      z_ora[i] = std::abs(test.y[i]) <= half ? 1 : 0;
      size_ora[i] = 2.0 * half;
    }

    Dataset ds_std = dataset_from_8d(test, z_std, size_std);
    Dataset ds_ora = dataset_from_8d(test, z_ora, size_ora);
    audit_arm(out.standard_cp, ds_std, cfg, substream(rep_seed, "arm-std"));
    audit_arm(out.oracle, ds_ora, cfg, substream(rep_seed, "arm-ora"));

    // Population ERT references by Monte Carlo over fresh feature draws.
    Rng mc_rng(substream(rep_seed, "mc"));
    std::vector<double> p_std(cfg.mc_samples);
    for (std::size_t i = 0; i < cfg.mc_samples; ++i) {
      double x1 = mc_rng.uniform(-1.0, 1.0);
      p_std[i] = true_coverage_standard_cp(x1, c.q_hat);
    }
    out.standard_cp.theoretical_l1.push_back(ert_oracle(l1, target, p_std));
    out.standard_cp.theoretical_l2.push_back(ert_oracle(l2, target, p_std));
    // The oracle rule has p(x) = target exactly, so its population ERT is 0.
    std::vector<double> p_ora(1, target);
    out.oracle.theoretical_l1.push_back(ert_oracle(l1, target, p_ora));
    out.oracle.theoretical_l2.push_back(ert_oracle(l2, target, p_ora));
  }

  finalize_stats(out.standard_cp);
  finalize_stats(out.oracle);
  return out;
}

namespace {

Dataset dataset_from_1d(const Sample1D& s, const std::vector<int>& z,
                        const std::vector<double>& sizes) {
  Dataset ds;
  FeatureColumn col;
  col.name = "x";
  col.numeric = s.x;
  ds.features.push_back(std::move(col));
  ds.z = z;
  ds.y = s.y;
  ds.set_size = sizes;
  return ds;
}

std::vector<Fig1Row> fig1_arm(const Sample1D& test, const std::vector<double>& lo,
                              const std::vector<double>& hi,
                              const std::vector<double>& true_p,
                              const Fig1Config& cfg, std::uint64_t arm_seed) {
  const std::size_t m = test.x.size();
  std::vector<int> z(m);
  std::vector<double> sizes(m);
  for (std::size_t i = 0; i < m; ++i) {
    z[i] = (test.y[i] >= lo[i] && test.y[i] <= hi[i]) ? 1 : 0;
    sizes[i] = hi[i] - lo[i];
  }
  Dataset ds = dataset_from_1d(test, z, sizes);
  FoldAssignment folds =
      make_folds(m, cfg.folds, substream(arm_seed, "folds"));

  ERTReport main_rep = ert_kfold(ds, cfg.classifier, make_l1(), cfg.alpha,
                                 folds, substream(arm_seed, "ert"));
  ClassifierSpec part;
  part.kind = ClassifierSpec::Kind::partition;
  ERTReport part_rep = ert_kfold(ds, part, make_l1(), cfg.alpha, folds,
                                 substream(arm_seed, "ert-partition"));

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return test.x[a] < test.x[b]; });

  std::vector<Fig1Row> rows;
  rows.reserve(m);
  for (std::size_t i : order) {
    Fig1Row r;
    r.x = test.x[i];
    r.y = test.y[i];
    r.z = z[i];
    r.lo = lo[i];
    r.hi = hi[i];
    r.proxy = main_rep.proxy[i];
    r.partition_proxy = part_rep.proxy[i];
    r.true_p = true_p[i];
    r.target = 1.0 - cfg.alpha;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

Fig1Result run_fig1(const Fig1Config& cfg) {
  Fig1Result out;

  Rng cal_rng(substream(cfg.seed, "cal"));
  Sample1D cal = gen_1d(cfg.n_cal, cal_rng);
  std::vector<double> scores(cfg.n_cal);
  for (std::size_t i = 0; i < cfg.n_cal; ++i)
    scores[i] = abs_residual_score(cal.y[i], f_mean_1d(cal.x[i]));
  ConformalCalibration c = conformal_quantile(scores, cfg.alpha);
  out.q_hat = c.q_hat;

  Rng test_rng(substream(cfg.seed, "test"));
  Sample1D test = gen_1d(cfg.m_test, test_rng);

  const std::size_t m = cfg.m_test;
  std::vector<double> lo_std(m), hi_std(m), p_std(m);
  std::vector<double> lo_ora(m), hi_ora(m), p_ora(m, 1.0 - cfg.alpha);
  for (std::size_t i = 0; i < m; ++i) {
    double f = f_mean_1d(test.x[i]);
    lo_std[i] = f - c.q_hat;
    hi_std[i] = f + c.q_hat;
    p_std[i] = 2.0 * normal_cdf(c.q_hat / sigma_het(test.x[i])) - 1.0;
    double half = oracle_halfwidth(test.x[i], cfg.alpha);
    lo_ora[i] = f - half;
    hi_ora[i] = f + half;
  }
  out.standard_cp =
      fig1_arm(test, lo_std, hi_std, p_std, cfg, substream(cfg.seed, "arm-std"));
  out.oracle =
      fig1_arm(test, lo_ora, hi_ora, p_ora, cfg, substream(cfg.seed, "arm-ora"));
  return out;
}

}  // namespace covaudit
