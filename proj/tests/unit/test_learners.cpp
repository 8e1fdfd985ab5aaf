#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracle.hpp"
#include "survml/learners.hpp"
#include "survml/log.hpp"
#include "survml/random.hpp"

using namespace survml;

namespace {

Dataset dataset(std::size_t rows, std::size_t cols, std::vector<double> x, std::vector<int> y) {
  return make_dataset(Matrix(rows, cols, std::move(x)), std::move(y));
}

double accuracy(const TrainedModel& m, const Dataset& d) {
  const auto p = m.predict(d.features);
  double hit = 0;
  for (std::size_t i = 0; i < p.size(); ++i) hit += p[i] == d.labels[i];
  return hit / static_cast<double>(p.size());
}

Dataset random_dataset(Rng& rng, std::size_t n, std::size_t d, double signal = 1.0) {
  Matrix x(n, d);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = static_cast<int>(rng.below(2));
    for (std::size_t j = 0; j < d; ++j) x(i, j) = rng.normal() + signal * (y[i] ? 1.0 : -1.0);
  }
  y[0] = 0;
  y[1] = 1;
  return make_dataset(std::move(x), std::move(y));
}

std::vector<double> flatten(const LinearParams& p) {
  std::vector<double> v = {p.bias};
  v.insert(v.end(), p.weights.begin(), p.weights.end());
  return v;
}

LinearParams unflatten(const std::vector<double>& v) {
  return LinearParams{v[0], std::vector<double>(v.begin() + 1, v.end())};
}

// Two well separated clusters of `per` points each, centred at -3 and +3.
Dataset clusters(Rng& rng, std::size_t per, std::size_t d) {
  Matrix x(2 * per, d);
  std::vector<int> y(2 * per);
  for (std::size_t i = 0; i < 2 * per; ++i) {
    y[i] = i < per ? 0 : 1;
    for (std::size_t j = 0; j < d; ++j) x(i, j) = (y[i] ? 3.0 : -3.0) + 0.5 * rng.normal();
  }
  return make_dataset(std::move(x), std::move(y));
}

}  // namespace

// ---------------------------------------------------------------------------
// Logistic regression

TEST_CASE("logistic: zero weights score one half") {
  const TrainedModel m(LearnerSpec(LearnerKind::logistic), 2, LinearParams{0.0, {0.0, 0.0}});
  const auto s = m.decision_score(Matrix(3, 2, std::vector<double>{1, 2, -5, 7, 0, 0}));
  CHECK(s == std::vector<double>{0.5, 0.5, 0.5});

  const auto d = dataset(2, 1, {1, 2}, {0, 1});
  const auto untrained = train_logistic(d, LogisticOptions{0.1, 0, 0.0});
  CHECK(untrained.score_row(std::vector<double>{3.0}) == 0.5);
}

TEST_CASE("logistic: separable 1-D set is fitted exactly") {
  const auto d = dataset(4, 1, {-1, -2, 1, 2}, {0, 0, 1, 1});
  const auto m = train_logistic(d, LogisticOptions{0.1, 500, 1e-4});
  CHECK(accuracy(m, d) == 1.0);
}

TEST_CASE("logistic: analytic gradient matches finite differences") {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto d = random_dataset(rng, 5, 3, 0.5);
    LinearParams p{rng.normal(), {rng.normal(), rng.normal(), rng.normal()}};
    const double l2 = 0.1 * rng.uniform_open();
    const auto fd = oracle::finite_difference_gradient(
        [&](const std::vector<double>& v) { return logistic_loss(unflatten(v), d, l2); }, flatten(p));
    const auto g = flatten(logistic_gradient(p, d, l2));
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(std::fabs(g[j] - fd[j]) < 1e-6);
  }
}

TEST_CASE("logistic: full-batch loss never increases") {
  Rng rng(2);
  const auto d = random_dataset(rng, 80, 4, 0.4);
  TrainingTrace trace;
  train_logistic(d, LogisticOptions{0.1, 300, 1e-3}, &trace);
  REQUIRE(trace.losses.size() == 301);
  for (std::size_t i = 1; i < trace.losses.size(); ++i) {
    CHECK(trace.losses[i] <= trace.losses[i - 1] + 1e-15);
  }
}

TEST_CASE("logistic: logit of the score is the linear predictor") {
  Rng rng(3);
  const auto d = random_dataset(rng, 60, 3, 0.3);
  const auto m = train_logistic(d);
  const auto& p = std::get<LinearParams>(m.params());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double s = m.score_row(d.features.row(i));
    REQUIRE(s > 1e-12);
    REQUIRE(s < 1 - 1e-12);
    double z = p.bias;
    for (std::size_t j = 0; j < d.width(); ++j) z += p.weights[j] * d.features(i, j);
    CHECK(std::fabs(std::log(s / (1 - s)) - z) < 1e-9);
  }
}

TEST_CASE("logistic: divergence names the learning rate") {
  const auto d = dataset(4, 1, {-1e150, -2e150, 1e150, 2e150}, {0, 0, 1, 1});
  try {
    train_logistic(d, LogisticOptions{1e10, 5, 0.0});
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& e) {
    CHECK(std::string(e.what()).find("learning") != std::string::npos);
  }
}

// ---------------------------------------------------------------------------
// Linear SVM

TEST_CASE("svm: hinge objective at the origin is one") {
  Rng rng(4);
  const auto d = random_dataset(rng, 10, 2);
  CHECK(hinge_objective(LinearParams{0.0, {0.0, 0.0}}, d, 0.5) == 1.0);
}

TEST_CASE("svm: two-point separable set") {
  const auto d = dataset(2, 1, {-1, 1}, {0, 1});
  const auto m = train_svm(d);
  CHECK(std::get<LinearParams>(m.params()).weights[0] > 0);
  CHECK(accuracy(m, d) == 1.0);
  CHECK(m.threshold() == 0.0);
}

TEST_CASE("svm: subgradient matches finite differences away from kinks") {
  Rng rng(5);
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 50; ++trial) {
    const auto d = random_dataset(rng, 5, 3, 0.5);
    LinearParams p{rng.normal(), {rng.normal(), rng.normal(), rng.normal()}};
    bool near_kink = false;
    for (std::size_t i = 0; i < d.size(); ++i) {
      double f = p.bias;
      for (std::size_t j = 0; j < 3; ++j) f += p.weights[j] * d.features(i, j);
      const double y = d.labels[i] ? 1.0 : -1.0;
      if (std::fabs(1 - y * f) < 1e-3) near_kink = true;
    }
    if (near_kink) continue;
    ++checked;
    const auto fd = oracle::finite_difference_gradient(
        [&](const std::vector<double>& v) { return hinge_objective(unflatten(v), d, 0.01); }, flatten(p));
    const auto g = flatten(hinge_subgradient(p, d, 0.01));
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(std::fabs(g[j] - fd[j]) < 1e-6);
  }
  CHECK(checked == 50);
}

TEST_CASE("svm: lambda must be positive") {
  const auto d = dataset(2, 1, {-1, 1}, {0, 1});
  CHECK_THROWS_AS(train_svm(d, SvmOptions{0.0, 10, 1}), ParameterError);
  CHECK_THROWS_AS(train(LearnerSpec(LearnerKind::svm, {{"lambda", "-1"}}), d), ParameterError);
}

// ---------------------------------------------------------------------------
// CART

TEST_CASE("tree: gini impurity") {
  CHECK(gini_impurity(std::vector<int>{0, 0, 1, 1}) == 0.5);
  CHECK(gini_impurity(std::vector<int>{0, 0, 0, 0}) == 0.0);
}

TEST_CASE("tree: root split on the 4-point fixture") {
  const auto d = dataset(4, 1, {1, 2, 3, 4}, {0, 0, 1, 1});
  const auto ref = oracle::exhaustive_gini_split(d.features, d.labels);
  CHECK(std::fabs(ref.threshold - 2.5) < 1e-9);
  CHECK(ref.weighted_gini == 0.0);
  const auto m = train_tree(d);
  const auto& t = std::get<Tree>(m.params());
  CHECK(t.nodes[0].feature == 0);
  CHECK(std::fabs(t.nodes[0].threshold - ref.threshold) < 1e-9);
  CHECK(t.depth() == 1);
  CHECK(accuracy(m, d) == 1.0);
}

TEST_CASE("tree: root split agrees with exhaustive search") {
  Rng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 4 + rng.below(20);
    Matrix x(n, 3);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<int>(rng.below(2));
      for (std::size_t j = 0; j < 3; ++j) x(i, j) = static_cast<double>(rng.below(6));
    }
    y[0] = 0;
    y[1] = 1;
    const auto d = make_dataset(x, y);
    std::optional<oracle::GiniSplit> ref;
    try {
      ref = oracle::exhaustive_gini_split(x, y);
    } catch (const oracle::OracleError&) {
      continue;
    }
    const auto model = train_tree(d);
    const auto& root = std::get<Tree>(model.params()).nodes[0];
    REQUIRE_FALSE(root.is_leaf());
    CHECK(static_cast<std::size_t>(root.feature) == ref->feature);
    CHECK(root.threshold == ref->threshold);
  }
}

TEST_CASE("tree: XOR is solved at depth 2") {
  const auto d = dataset(4, 2, {0, 0, 0, 1, 1, 0, 1, 1}, {0, 1, 1, 0});
  const auto m = train_tree(d, TreeOptions{2, 2});
  CHECK(accuracy(m, d) == 1.0);
}

TEST_CASE("tree: leaves carry their majority and node gini stays in range") {
  Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const auto d = random_dataset(rng, 50, 3, 0.2);
    const auto m = train_tree(d, TreeOptions{3, 2});
    const auto& t = std::get<Tree>(m.params());
    for (const auto& node : t.nodes) {
      const double g = 1 - node.fraction * node.fraction - (1 - node.fraction) * (1 - node.fraction);
      CHECK(g >= 0.0);
      CHECK(g <= 0.5);
      if (node.is_leaf()) CHECK(node.label == (node.fraction > 0.5 ? 1 : 0));
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
      const auto& leaf = t.leaf_for(d.features.row(i));
      CHECK(m.predict_row(d.features.row(i)) == leaf.label);
    }
  }
}

// ---------------------------------------------------------------------------
// Forest and extra trees

TEST_CASE("forest: a single full-feature unbagged tree is plain CART") {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const auto d = random_dataset(rng, 60, 4, 0.3);
    ForestOptions fo;
    fo.n_trees = 1;
    fo.z_features = 4;
    fo.bootstrap = false;
    const auto forest = train_forest(d, fo);
    const auto tree = train_tree(d, TreeOptions{fo.max_depth, fo.min_samples_split});
    const auto q = random_dataset(rng, 100, 4, 0.3);
    CHECK(forest.predict(q.features) == tree.predict(q.features));
  }
}

TEST_CASE("forest: scores are vote fractions") {
  Rng rng(9);
  const auto d = random_dataset(rng, 80, 4, 0.3);
  const auto m = train_forest(d);
  const auto q = random_dataset(rng, 200, 4, 0.3);
  for (double s : m.decision_score(q.features)) {
    CHECK(std::fabs(s * 100 - std::round(s * 100)) < 1e-9);
  }
}

TEST_CASE("forest: separated clusters are classified perfectly") {
  Rng rng(10);
  const auto train_set = clusters(rng, 20, 3);
  const auto test_set = clusters(rng, 25, 3);
  CHECK(accuracy(train_forest(train_set), test_set) == 1.0);
  CHECK(accuracy(train_extra_trees(train_set), test_set) == 1.0);
}

TEST_CASE("forest: z out of range") {
  const auto d = dataset(2, 1, {-1, 1}, {0, 1});
  ForestOptions fo;
  fo.z_features = 2;
  CHECK_THROWS_AS(train_forest(d, fo), ParameterError);
  fo.z_features = 0;
  CHECK_THROWS_AS(train_extra_trees(d, fo), ParameterError);
}

TEST_CASE("extra trees: random threshold inside the feature range") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto d = dataset(4, 1, {0, 1, 0, 1}, {0, 1, 0, 1});
    ForestOptions fo;
    fo.n_trees = 1;
    fo.z_features = 1;
    fo.seed = seed;
    const auto m = train_extra_trees(d, fo);
    const auto& root = std::get<TreeEnsemble>(m.params()).trees[0].nodes[0];
    REQUIRE_FALSE(root.is_leaf());
    CHECK(root.threshold > 0.0);
    CHECK(root.threshold < 1.0);
  }
}

TEST_CASE("extra trees: constant features are skipped") {
  const auto d = dataset(4, 2, {7, 0, 7, 1, 7, 2, 7, 3}, {0, 0, 1, 1});
  ForestOptions fo;
  fo.n_trees = 10;
  fo.z_features = 1;
  const auto m = train_extra_trees(d, fo);
  for (const auto& t : std::get<TreeEnsemble>(m.params()).trees) {
    for (const auto& node : t.nodes) {
      if (!node.is_leaf()) CHECK(node.feature == 1);
    }
  }
}

// ---------------------------------------------------------------------------
// KNN

TEST_CASE("knn: worked example") {
  const auto d = dataset(3, 2, {0, 0, 0, 1, 2, 2}, {0, 0, 1});
  const auto m = train_knn(d, KnnOptions{3, DistanceMetric::euclidean, 2.0, true});
  const std::vector<double> q = {0, 0.4};
  const double ref = oracle::knn_bruteforce_score(d.features, d.labels, q, 3, DistanceMetric::euclidean);
  CHECK(std::fabs(ref - 1.0 / 3) < 1e-12);
  CHECK(m.score_row(q) == doctest::Approx(ref));
  CHECK(m.predict_row(q) == oracle::knn_bruteforce(d.features, d.labels, q, 3, DistanceMetric::euclidean));
  CHECK(m.predict_row(q) == 0);
}

TEST_CASE("knn: exact match with k = 1 and training accuracy one") {
  Rng rng(11);
  const auto d = random_dataset(rng, 40, 3);
  const auto m = train_knn(d, KnnOptions{1});
  CHECK(accuracy(m, d) == 1.0);
}

TEST_CASE("knn: agrees with brute force for every metric") {
  Rng rng(12);
  const DistanceMetric metrics[] = {DistanceMetric::euclidean, DistanceMetric::manhattan,
                                    DistanceMetric::minkowski, DistanceMetric::hamming};
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng.below(40);
    const std::size_t dim = 1 + rng.below(4);
    Matrix x(n, dim);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<int>(rng.below(2));
      for (std::size_t j = 0; j < dim; ++j) x(i, j) = static_cast<double>(rng.below(4));
    }
    const auto d = make_dataset(x, y);
    const auto metric = metrics[rng.below(4)];
    const double p = 1.0 + 2.0 * rng.uniform_open();
    int k = 1 + 2 * static_cast<int>(rng.below((n + 1) / 2));
    const auto m = train_knn(d, KnnOptions{k, metric, p, true});
    for (int q = 0; q < 5; ++q) {
      std::vector<double> query(dim);
      for (auto& v : query) v = static_cast<double>(rng.below(4));
      CHECK(m.predict_row(query) == oracle::knn_bruteforce(x, y, query, k, metric, p));
      CHECK(m.score_row(query) == doctest::Approx(oracle::knn_bruteforce_score(x, y, query, k, metric, p)));
    }
  }
}

TEST_CASE("knn: minkowski with p = 2 orders like euclidean") {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(4), b(4), c(4);
    for (std::size_t j = 0; j < 4; ++j) {
      a[j] = rng.normal();
      b[j] = rng.normal();
      c[j] = rng.normal();
    }
    const bool e = distance(a, b, DistanceMetric::euclidean, 2) < distance(a, c, DistanceMetric::euclidean, 2);
    const bool mk = distance(a, b, DistanceMetric::minkowski, 2) < distance(a, c, DistanceMetric::minkowski, 2);
    CHECK(e == mk);
    CHECK(distance(a, b, DistanceMetric::minkowski, 2) ==
          doctest::Approx(distance(a, b, DistanceMetric::euclidean, 2)).epsilon(1e-12));
  }
}

TEST_CASE("knn: parameter checks and odd k") {
  const auto d = dataset(3, 1, {0, 1, 2}, {0, 1, 1});
  CHECK_THROWS_AS(train_knn(d, KnnOptions{5}), ParameterError);
  CHECK_THROWS_AS(train_knn(d, KnnOptions{1, DistanceMetric::minkowski, 0.5, true}), ParameterError);
  std::vector<std::string> warnings;
  set_warning_sink([&](const std::string& m) { warnings.push_back(m); });
  const auto m = train_knn(d, KnnOptions{2});
  set_warning_sink({});
  CHECK(std::get<KnnParams>(m.params()).k == 1);
  CHECK(warnings.size() == 1);
}

// ---------------------------------------------------------------------------
// AdaBoost

TEST_CASE("adaboost: first round with error one quarter") {
  const auto d = dataset(4, 1, {1, 2, 3, 4}, {0, 1, 0, 1});
  const std::vector<double> w(4, 0.25);
  const auto ref = oracle::exhaustive_stump(d.features, d.labels, w);
  CHECK(std::fabs(ref.weighted_error - 0.25) < 1e-12);
  BoostTrace trace;
  train_adaboost(d, AdaBoostOptions{1}, &trace);
  REQUIRE(trace.rounds.size() == 1);
  const auto& r = trace.rounds[0];
  CHECK(std::fabs(r.error - 0.25) < 1e-12);
  CHECK(std::fabs(r.alpha - 0.5 * std::log(3.0)) < 1e-9);
  CHECK(r.stump.threshold == ref.threshold);
  CHECK(r.stump.polarity == ref.polarity);

  // The same stump scores exactly one half on the updated weights.
  double wrong = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const int truth = d.labels[i] ? 1 : -1;
    if (r.stump.vote(d.features.row(i)) != truth) wrong += r.weights_after[i];
  }
  CHECK(std::fabs(wrong - 0.5) < 1e-12);
}

TEST_CASE("adaboost: weight normalisation and the one-half identity every round") {
  Rng rng(14);
  for (int trial = 0; trial < 40; ++trial) {
    const auto d = random_dataset(rng, 30, 3, 0.3);
    BoostTrace trace;
    train_adaboost(d, AdaBoostOptions{30}, &trace);
    for (const auto& r : trace.rounds) {
      if (!r.kept) continue;
      CHECK(r.alpha > 0);
      const double sum = std::accumulate(r.weights_after.begin(), r.weights_after.end(), 0.0);
      CHECK(std::fabs(sum - 1.0) < 1e-12);
      if (r.error < 1e-10) continue;
      double wrong = 0;
      for (std::size_t i = 0; i < d.size(); ++i) {
        const int truth = d.labels[i] ? 1 : -1;
        if (r.stump.vote(d.features.row(i)) != truth) wrong += r.weights_after[i];
      }
      CHECK(std::fabs(wrong - 0.5) < 1e-12);
    }
  }
}

TEST_CASE("adaboost: first stump matches exhaustive search") {
  Rng rng(15);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 4 + rng.below(20);
    Matrix x(n, 3);
    std::vector<int> y(n);
    std::vector<double> w(n);
    std::vector<int> signs(n);
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<int>(rng.below(2));
      signs[i] = y[i] ? 1 : -1;
      w[i] = rng.uniform_open();
      total += w[i];
      for (std::size_t j = 0; j < 3; ++j) x(i, j) = static_cast<double>(rng.below(5));
    }
    for (auto& v : w) v /= total;
    const auto ref = oracle::exhaustive_stump(x, y, w);
    const auto fit = fit_stump(x, signs, w);
    CHECK(fit.stump.feature == ref.feature);
    CHECK(fit.stump.threshold == ref.threshold);
    CHECK(fit.stump.polarity == ref.polarity);
    CHECK(std::fabs(fit.error - ref.weighted_error) < 1e-9);
  }
}

TEST_CASE("adaboost: stump-separable data stops after one capped round") {
  const auto d = dataset(4, 1, {1, 2, 3, 4}, {0, 0, 1, 1});
  const auto m = train_adaboost(d);
  const auto& p = std::get<BoostParams>(m.params());
  REQUIRE(p.alphas.size() == 1);
  CHECK(p.alphas[0] == doctest::Approx(0.5 * std::log((1 - 1e-10) / 1e-10)));
  CHECK(accuracy(m, d) == 1.0);
  CHECK_THROWS_AS(train_adaboost(d, AdaBoostOptions{0}), ParameterError);
  CHECK_THROWS_AS(train_adaboost(dataset(2, 1, {1, 2}, {1, 1})), EvaluationError);
}

// ---------------------------------------------------------------------------
// Shared contract

TEST_CASE("every learner: predict agrees with score, scores finite, runs deterministic") {
  Rng rng(16);
  for (int trial = 0; trial < 5; ++trial) {
    const auto d = random_dataset(rng, 60, 4, 0.4);
    const auto q = random_dataset(rng, 200, 4, 0.8);
    for (auto kind : kAllLearners) {
      const LearnerSpec spec(kind, {}, 100 + static_cast<std::uint64_t>(trial));
      const auto a = train(spec, d);
      const auto b = train(spec, d);
      const auto scores = a.decision_score(q.features);
      const auto preds = a.predict(q.features);
      CHECK(scores == b.decision_score(q.features));
      for (std::size_t i = 0; i < scores.size(); ++i) {
        CHECK(std::isfinite(scores[i]));
        CHECK(preds[i] == (scores[i] > a.threshold() ? 1 : 0));
      }
      CHECK_THROWS_AS(a.predict(Matrix(1, 3)), ShapeError);
    }
  }
}

TEST_CASE("learner specs validate names and values") {
  CHECK_THROWS_AS(LearnerSpec(LearnerKind::tree, {{"n_trees", "3"}}), ParameterError);
  CHECK_THROWS_AS(LearnerSpec(LearnerKind::logistic, {{"epochs", "many"}}), ParameterError);
  CHECK_THROWS_AS(LearnerSpec(LearnerKind::knn, {{"metric", "cosine"}}), ParameterError);
  CHECK_NOTHROW(LearnerSpec(LearnerKind::knn, {{"metric", "manhattan"}, {"k", "3"}}));
  CHECK_NOTHROW(LearnerSpec(LearnerKind::forest, {{"z_features", "sqrt"}}));
  CHECK(parse_kind("ada") == LearnerKind::adaboost);
  CHECK(parse_kind("extra_trees") == LearnerKind::extra_trees);
  CHECK_FALSE(parse_kind("gbm"));
  const auto k = knn_options(LearnerSpec(LearnerKind::knn, {{"k", "7"}, {"metric", "minkowski"}, {"p", "3"}}));
  CHECK(k.k == 7);
  CHECK(k.metric == DistanceMetric::minkowski);
  CHECK(k.p == 3.0);
}
