#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracle.hpp"
#include "survml/eval.hpp"
#include "survml/random.hpp"

using namespace survml;

TEST_CASE("confusion examples") {
  const std::vector<int> t = {1, 0, 1, 0};
  CHECK(confusion(t, std::vector<int>{1, 0, 0, 0}) == ConfusionMatrix{1, 0, 2, 1});
  const auto perfect = confusion(t, t);
  CHECK(perfect.fp == 0);
  CHECK(perfect.fn == 0);
  const auto inverted = confusion(t, std::vector<int>{0, 1, 0, 1});
  CHECK(inverted.tp == 0);
  CHECK(inverted.tn == 0);
  CHECK_THROWS_AS(confusion(t, std::vector<int>{1}), ShapeError);
}

TEST_CASE("metrics examples") {
  const auto m = metrics(ConfusionMatrix{1, 0, 2, 1});
  CHECK(std::fabs(m.accuracy - 0.75) < 1e-9);
  CHECK(std::fabs(m.precision - 1.0) < 1e-9);
  CHECK(std::fabs(m.recall - 0.5) < 1e-9);
  CHECK(m.fpr == 0.0);
  CHECK_FALSE(m.degenerate());

  const auto all = metrics(ConfusionMatrix{5, 0, 5, 0});
  CHECK(all.accuracy == 1.0);
  CHECK(all.fpr == 0.0);

  const auto none = metrics(ConfusionMatrix{0, 0, 3, 2});
  CHECK(none.precision == 0.0);
  CHECK(none.precision_undefined);
  CHECK(none.degenerate());
  CHECK_THROWS_AS(metrics(ConfusionMatrix{}), EvaluationError);
}

TEST_CASE("recall equals tpr") {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const ConfusionMatrix cm{rng.below(5), rng.below(5), rng.below(5) + 1, rng.below(5)};
    const auto m = metrics(cm);
    CHECK(m.recall == m.tpr);
  }
}

TEST_CASE("roc and auc on the 4-point fixture") {
  const std::vector<int> t = {0, 0, 1, 1};
  const std::vector<double> s = {0.1, 0.4, 0.35, 0.8};
  const auto ref = oracle::roc_bruteforce(t, s);
  const auto curve = roc_curve(t, s);
  const std::vector<std::pair<double, double>> expected = {{0, 0}, {0, 0.5}, {0.5, 0.5}, {0.5, 1}, {1, 1}};
  REQUIRE(curve.points.size() == expected.size());
  REQUIRE(ref.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(std::fabs(ref[i].fpr - expected[i].first) < 1e-9);
    CHECK(std::fabs(ref[i].tpr - expected[i].second) < 1e-9);
    CHECK(std::fabs(curve.points[i].fpr - ref[i].fpr) < 1e-9);
    CHECK(std::fabs(curve.points[i].tpr - ref[i].tpr) < 1e-9);
  }
  CHECK(std::fabs(oracle::auc_pairwise(t, s) - 0.75) < 1e-9);
  CHECK(std::fabs(auc(curve) - 0.75) < 1e-9);
}

TEST_CASE("roc edge cases") {
  const std::vector<int> t = {0, 1, 0, 1};
  const auto perfect = roc_curve(t, std::vector<double>{0, 1, 0, 1});
  const bool corner = std::any_of(perfect.points.begin(), perfect.points.end(),
                                  [](const RocPoint& p) { return p.fpr == 0.0 && p.tpr == 1.0; });
  CHECK(corner);
  CHECK(auc(perfect) == 1.0);

  const auto flat = roc_curve(t, std::vector<double>{2, 2, 2, 2});
  REQUIRE(flat.points.size() == 2);
  CHECK(flat.points[1].fpr == 1.0);
  CHECK(flat.points[1].tpr == 1.0);
  CHECK(auc(flat) == 0.5);
  CHECK_THROWS_AS(roc_curve(std::vector<int>{1, 1}, std::vector<double>{0, 1}), EvaluationError);
}

TEST_CASE("roc is monotone and trapezoid auc matches the pairwise statistic") {
  Rng rng(2);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.below(60);
    std::vector<int> t(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = static_cast<int>(rng.below(2));
      s[i] = trial % 2 ? static_cast<double>(rng.below(5)) : rng.normal();
    }
    t[0] = 0;
    t[1] = 1;
    const auto c = roc_curve(t, s);
    CHECK(c.points.front().fpr == 0.0);
    CHECK(c.points.front().tpr == 0.0);
    CHECK(c.points.back().fpr == 1.0);
    CHECK(c.points.back().tpr == 1.0);
    for (std::size_t i = 1; i < c.points.size(); ++i) {
      CHECK(c.points[i].fpr >= c.points[i - 1].fpr);
      CHECK(c.points[i].tpr >= c.points[i - 1].tpr);
    }
    CHECK(std::fabs(auc(c) - oracle::auc_pairwise(t, s)) < 1e-9);
  }
}

TEST_CASE("kfold examples") {
  const auto loo = kfold_indices(10, 10, 1);
  for (const auto& f : loo) CHECK(f.size() == 1);
  auto three = kfold_indices(10, 3, 1);
  std::vector<std::size_t> sizes;
  for (const auto& f : three) sizes.push_back(f.size());
  std::sort(sizes.begin(), sizes.end());
  CHECK(sizes == std::vector<std::size_t>{3, 3, 4});
  CHECK_THROWS_AS(kfold_indices(10, 1, 1), ParameterError);
  CHECK_THROWS_AS(kfold_indices(3, 4, 1), ParameterError);
}

TEST_CASE("stratified folds on a 60/40 set of 100") {
  std::vector<int> y(100);
  for (std::size_t i = 0; i < 100; ++i) y[i] = i < 60 ? 1 : 0;
  const auto folds = kfold_indices(100, 10, 42, std::span<const int>(y));
  for (const auto& f : folds) {
    int pos = 0;
    for (auto i : f) pos += y[i];
    CHECK(f.size() == 10);
    CHECK(std::abs(pos - 6) <= 1);
    CHECK(std::abs(static_cast<int>(f.size()) - pos - 4) <= 1);
  }
}

TEST_CASE("kfold output is a balanced partition") {
  Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.below(150);
    const std::size_t k = 2 + rng.below(n - 1);
    std::vector<int> y(n);
    for (auto& v : y) v = static_cast<int>(rng.below(2));
    const bool strat = trial % 2 == 0;
    const auto folds = strat ? kfold_indices(n, k, trial, std::span<const int>(y))
                             : kfold_indices(n, k, trial);
    REQUIRE(folds.size() == k);
    std::vector<int> seen(n, 0);
    std::size_t lo = n, hi = 0;
    for (const auto& f : folds) {
      for (auto i : f) ++seen[i];
      lo = std::min(lo, f.size());
      hi = std::max(hi, f.size());
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
    CHECK(hi - lo <= 1);
    if (strat) {
      for (int c : {0, 1}) {
        std::size_t clo = n, chi = 0;
        for (const auto& f : folds) {
          std::size_t cnt = 0;
          for (auto i : f) cnt += y[i] == c;
          clo = std::min(clo, cnt);
          chi = std::max(chi, cnt);
        }
        CHECK(chi - clo <= 1);
      }
    }
    const auto again = strat ? kfold_indices(n, k, trial, std::span<const int>(y))
                             : kfold_indices(n, k, trial);
    CHECK(again == folds);
  }
}

TEST_CASE("cross-validation of a majority stub reports the class balance") {
  const std::size_t n = 1000;
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = i < 579 ? 1 : 0;
  const auto data = make_dataset(Matrix(n, 1), y);
  std::vector<std::size_t> validated(n, 0);
  auto prepare = [&](std::span<const std::size_t> tr, std::span<const std::size_t> te) {
    for (auto i : te) ++validated[i];
    return std::pair{data.select_rows(tr), data.select_rows(te)};
  };
  auto majority = [](const Dataset& train_set, const Dataset& test_set) {
    const int label = 2 * train_set.count_label(1) > train_set.size() ? 1 : 0;
    return std::vector<int>(test_set.size(), label);
  };
  const auto r = cross_validate_with(y, 10, 42, true, prepare, majority);
  CHECK(r.fold_accuracies.size() == 10);
  CHECK(std::fabs(r.mean - 0.579) < 0.02);
  const double mean = std::accumulate(r.fold_accuracies.begin(), r.fold_accuracies.end(), 0.0) / 10.0;
  CHECK(std::fabs(r.mean - mean) < 1e-12);
  CHECK(std::all_of(validated.begin(), validated.end(), [](std::size_t c) { return c == 1; }));
}

TEST_CASE("leave-one-out 1-NN matches brute force") {
  Rng rng(4);
  const std::size_t n = 30;
  Matrix x(n, 2);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = i < n / 2 ? 0 : 1;
    x(i, 0) = (y[i] ? 1.5 : -1.5) + rng.normal();
    x(i, 1) = rng.normal();
  }
  const auto data = make_dataset(x, y);
  const auto r = cross_validate(LearnerSpec(LearnerKind::knn, {{"k", "1"}}), data, n, 7,
                                CvOptions{false, false, std::nullopt});
  CHECK(std::fabs(r.mean - oracle::loo_1nn_accuracy(x, y)) < 1e-12);
}

TEST_CASE("a single-class training fold is reported with its index") {
  const std::vector<int> y = {1, 1, 1, 0};
  const auto data = make_dataset(Matrix(4, 1, std::vector<double>{1, 2, 3, 4}), y);
  try {
    cross_validate(LearnerSpec(LearnerKind::tree), data, 4, 1, CvOptions{false, false, std::nullopt});
    FAIL("expected EvaluationError");
  } catch (const EvaluationError& e) {
    CHECK(std::string(e.what()).find("fold") != std::string::npos);
  }
}
