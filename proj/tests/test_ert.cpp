#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "covaudit/dataset.hpp"
#include "covaudit/ert.hpp"
#include "covaudit/rng.hpp"
#include "covaudit/scores.hpp"

using namespace covaudit;

namespace {

Dataset make_1d(const std::vector<double>& x, const std::vector<int>& z) {
  Dataset ds;
  FeatureColumn f;
  f.name = "x";
  f.numeric = x;
  ds.features = {f};
  ds.z = z;
  return ds;
}

// Two-level conditional coverage: p = 0.95 on x > 0.5, else 0.65.
Dataset make_two_level(std::size_t m, std::uint64_t seed,
                       std::vector<double>* p_out = nullptr) {
  Rng rng(seed);
  std::vector<double> x(m);
  std::vector<int> z(m);
  for (std::size_t i = 0; i < m; ++i) {
    x[i] = rng.uniform01();
    double p = x[i] > 0.5 ? 0.95 : 0.65;
    if (p_out) p_out->push_back(p);
    z[i] = rng.uniform01() < p ? 1 : 0;
  }
  return make_1d(x, z);
}

}  // namespace

TEST_CASE("ert_terms reproduces the hand-worked score gaps") {
  ProperScore l1 = make_l1();
  std::vector<double> targets(4, 0.9);

  std::vector<double> terms =
      ert_terms(l1, {0.9, 0.9, 0.9, 0.1}, {1, 1, 1, 0}, targets);
  CHECK(terms == std::vector<double>{0.0, 0.0, 0.0, 0.9});

  // h == target makes every term vanish identically.
  for (const char* n : {"l1", "l2", "kl"}) {
    std::vector<double> zero =
        ert_terms(score_by_name(n), {0.9, 0.9, 0.9, 0.9}, {1, 0, 1, 0}, targets);
    CHECK(zero == std::vector<double>(4, 0.0));
  }

  std::vector<double> brier =
      ert_terms(make_brier(), {1.0}, {1}, {0.9});
  CHECK(brier[0] == doctest::Approx(0.01).epsilon(1e-12));

  CHECK_THROWS_AS((void)ert_terms(l1, {0.9}, {1, 0}, {0.9, 0.9}),
                  std::invalid_argument);
}

TEST_CASE("ert_oracle averages the induced divergence") {
  ProperScore l1 = make_l1();
  CHECK(ert_oracle(l1, 0.9, {0.9, 0.9, 0.9}) == 0.0);
  CHECK(ert_oracle(l1, 0.9, {0.7, 1.0}) == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(ert_oracle(make_brier(), 0.9, {0.7}) ==
        doctest::Approx(0.04).epsilon(1e-12));
  CHECK_THROWS_AS((void)ert_oracle(l1, 0.9, {}), std::invalid_argument);
}

TEST_CASE("constant classifier at the target zeroes every ERT estimate") {
  Dataset ds = make_two_level(120, 5);
  ClassifierSpec spec;
  spec.kind = ClassifierSpec::Kind::constant;
  FoldAssignment fa = make_folds(ds.m(), 5, 77);
  for (const char* n : {"l1", "l2", "kl"}) {
    ERTReport rep = ert_kfold(ds, spec, score_by_name(n), 0.1, fa, 3);
    CHECK(rep.value == 0.0);
    CHECK(rep.std_err == 0.0);
    CHECK(rep.pooled_mean == 0.0);
    CHECK(rep.over == 0.0);
    CHECK(rep.under == 0.0);
    for (double f : rep.per_fold) CHECK(f == 0.0);
    for (double h : rep.proxy) CHECK(h == 0.9);
  }
}

TEST_CASE("per-row targets at a constant alpha equal the scalar run exactly") {
  Dataset plain = make_two_level(90, 12);
  Dataset with_alpha = plain;
  with_alpha.alpha_row.assign(90, 0.2);

  ClassifierSpec spec;
  spec.kind = ClassifierSpec::Kind::partition;
  spec.partition_clusters = 3;
  FoldAssignment fa = make_folds(90, 5, 4);

  for (const char* n : {"l1", "l2", "kl"}) {
    ERTReport a = ert_kfold(plain, spec, score_by_name(n), 0.2, fa, 6);
    ERTReport b = ert_kfold(with_alpha, spec, score_by_name(n), 0.2, fa, 6);
    CHECK(a.value == b.value);
    CHECK(a.std_err == b.std_err);
    CHECK(a.over == b.over);
    CHECK(a.under == b.under);
    CHECK(a.per_fold == b.per_fold);
    CHECK(a.proxy == b.proxy);
  }
}

TEST_CASE("ert_kfold value is permutation-invariant within fixed folds") {
  Dataset ds = make_two_level(60, 19);
  FoldAssignment fa = make_folds(60, 4, 31);

  // Reorder rows and carry the fold labels along.
  std::vector<std::size_t> perm(60);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(99);
  rng.shuffle(perm);
  Dataset shuffled = ds;
  FoldAssignment fa2 = fa;
  for (std::size_t i = 0; i < 60; ++i) {
    shuffled.features[0].numeric[i] = ds.features[0].numeric[perm[i]];
    shuffled.z[i] = ds.z[perm[i]];
    fa2.fold_of_row[i] = fa.fold_of_row[perm[i]];
  }

  ClassifierSpec spec;
  spec.kind = ClassifierSpec::Kind::partition;
  spec.partition_clusters = 2;
  ERTReport a = ert_kfold(ds, spec, make_l1(), 0.1, fa, 8);
  ERTReport b = ert_kfold(shuffled, spec, make_l1(), 0.1, fa2, 8);
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
  CHECK(a.std_err == doctest::Approx(b.std_err).epsilon(1e-12));
}

TEST_CASE("fold means aggregate to the value and over/under add up") {
  Dataset ds = make_two_level(200, 23);
  ClassifierSpec spec;
  spec.kind = ClassifierSpec::Kind::gbdt;
  FoldAssignment fa = make_folds(200, 5, 55);

  for (const char* n : {"l1", "l2", "kl"}) {
    ERTReport rep = ert_kfold(ds, spec, score_by_name(n), 0.1, fa, 2);
    double mean = 0.0;
    for (double f : rep.per_fold) mean += f;
    mean /= double(rep.per_fold.size());
    CHECK(rep.value == doctest::Approx(mean).epsilon(1e-12));
    CHECK(rep.over + rep.under == doctest::Approx(rep.value).epsilon(1e-10));
    CHECK(std::isfinite(rep.std_err));
    CHECK(rep.proxy.size() == 200);
    CHECK(rep.fold_of_row == fa.fold_of_row);
  }
}

TEST_CASE("ert_kfold_multi shares fits with per-score ert_kfold calls") {
  Dataset ds = make_two_level(100, 42);
  ClassifierSpec spec;
  spec.kind = ClassifierSpec::Kind::partition;
  FoldAssignment fa = make_folds(100, 5, 13);

  std::vector<ProperScore> scores = {make_l1(), make_brier(), make_log_loss()};
  std::vector<ERTReport> multi = ert_kfold_multi(ds, spec, scores, 0.1, fa, 21);
  REQUIRE(multi.size() == 3);
  for (std::size_t s = 0; s < 3; ++s) {
    ERTReport single = ert_kfold(ds, spec, scores[s], 0.1, fa, 21);
    CHECK(multi[s].score_name == scores[s].name);
    CHECK(multi[s].value == single.value);
    CHECK(multi[s].std_err == single.std_err);
    CHECK(multi[s].per_fold == single.per_fold);
    CHECK(multi[s].over == single.over);
    CHECK(multi[s].under == single.under);
    CHECK(multi[s].proxy == single.proxy);
  }
}

TEST_CASE("ert_kfold validates folds and alpha") {
  Dataset ds = make_two_level(30, 3);
  ClassifierSpec spec;
  spec.kind = ClassifierSpec::Kind::constant;
  CHECK_THROWS_AS((void)ert_kfold(ds, spec, make_l1(), 0.1, 1, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)ert_kfold(ds, spec, make_l1(), 0.1, 31, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)ert_kfold(ds, spec, make_l1(), 1.0, 5, 0),
                  std::invalid_argument);

  FoldAssignment wrong = make_folds(29, 5, 0);
  CHECK_THROWS_AS((void)ert_kfold(ds, spec, make_l1(), 0.1, wrong, 0),
                  std::invalid_argument);
}

TEST_CASE("classifier failure surfaces with the fold index attached") {
  Dataset ds = make_two_level(40, 2);
  ClassifierSpec spec;
  spec.kind = static_cast<ClassifierSpec::Kind>(42);
  try {
    (void)ert_kfold(ds, spec, make_l1(), 0.1, 4, 0);
    FAIL_CHECK("expected a tagged fold error");
  } catch (const std::runtime_error& e) {
    std::string msg = e.what();
    CHECK(msg.find("ert_kfold fold ") != std::string::npos);
    CHECK(msg.find("bad kind") != std::string::npos);
  }
}

TEST_CASE("degenerate coverage indicators warn but still evaluate") {
  Dataset ds = make_two_level(40, 6);
  ds.z.assign(40, 1);
  ClassifierSpec spec;
  spec.kind = ClassifierSpec::Kind::partition;
  ERTReport rep = ert_kfold(ds, spec, make_l1(), 0.1, 4, 0);
  REQUIRE_FALSE(rep.warnings.empty());
  CHECK(rep.warnings[0].find("every z is 1") != std::string::npos);
  CHECK(std::isfinite(rep.value));
}

TEST_CASE("forest proxies stay raw but unbounded scores see clamped values") {
  // x separates z perfectly, so fully grown trees emit exact 0/1 votes.
  std::vector<double> x(40);
  std::vector<int> z(40);
  for (std::size_t i = 0; i < 40; ++i) {
    x[i] = i < 20 ? -1.0 - double(i) : 1.0 + double(i);
    z[i] = i < 20 ? 0 : 1;
  }
  Dataset ds = make_1d(x, z);
  ClassifierSpec spec;
  spec.kind = ClassifierSpec::Kind::forest;
  spec.forest_trees = 5;

  ERTReport kl = ert_kfold(ds, spec, make_log_loss(), 0.1, 2, 90);
  CHECK(std::isfinite(kl.value));
  bool saw_raw_extreme = false;
  for (double h : kl.proxy) saw_raw_extreme |= (h == 0.0 || h == 1.0);
  CHECK(saw_raw_extreme);

  ERTReport l1 = ert_kfold(ds, spec, make_l1(), 0.1, 2, 90);
  CHECK(std::isfinite(l1.value));
}

TEST_CASE("k-fold estimate respects the oracle lower bound") {
  std::vector<double> p_true;
  Dataset ds = make_two_level(800, 71, &p_true);
  ClassifierSpec spec;
  spec.kind = ClassifierSpec::Kind::partition;
  spec.partition_clusters = 2;

  for (const char* n : {"l1", "l2", "kl"}) {
    ProperScore s = score_by_name(n);
    double oracle = ert_oracle(s, 0.9, p_true);
    ERTReport rep = ert_kfold(ds, spec, s, 0.1, 5, 15);
    CHECK(rep.value <= oracle + 3.0 * rep.std_err);
    // The signal here is real, so the estimate should also be clearly
    // positive for the well-specified partition classifier.
    CHECK(rep.value > 0.0);
  }
}
