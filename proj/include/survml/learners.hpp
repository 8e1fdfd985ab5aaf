#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "survml/data.hpp"

namespace survml {

enum class LearnerKind { logistic, svm, tree, forest, extra_trees, knn, adaboost };

/// Enumeration order; also the row order of every report.
inline constexpr std::array<LearnerKind, 7> kAllLearners = {
    LearnerKind::logistic, LearnerKind::svm,  LearnerKind::tree,    LearnerKind::forest,
    LearnerKind::extra_trees, LearnerKind::knn, LearnerKind::adaboost};

std::string_view kind_name(LearnerKind kind);  ///< "logistic", "svm", ...
std::string_view kind_code(LearnerKind kind);  ///< "lr", "svm", "dt", "rf", "et", "knn", "ada"
/// Accepts either the long name or the short code.
std::optional<LearnerKind> parse_kind(std::string_view text);

using Hyperparameters = std::map<std::string, std::string>;

/// Learner kind plus validated hyperparameter overrides. Unknown names and
/// malformed values are rejected with ParameterError at construction.
class LearnerSpec {
 public:
  explicit LearnerSpec(LearnerKind kind, Hyperparameters hyper = {}, std::uint64_t seed = 42);

  LearnerKind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }
  const Hyperparameters& hyper() const { return hyper_; }

  double number_or(const std::string& name, double fallback) const;
  std::string text_or(const std::string& name, const std::string& fallback) const;

  static const std::vector<std::string>& allowed_names(LearnerKind kind);

  bool operator==(const LearnerSpec&) const = default;

 private:
  LearnerKind kind_;
  Hyperparameters hyper_;
  std::uint64_t seed_;
};

// ---------------------------------------------------------------------------
// Per-learner options. Defaults are the benchmark defaults.

struct LogisticOptions {
  double learning_rate = 0.1;
  int epochs = 500;
  double l2 = 1e-4;
};

struct SvmOptions {
  double lambda = 1e-3;
  int epochs = 200;
  std::uint64_t seed = 42;
};

struct TreeOptions {
  int max_depth = 8;  ///< 0 = unlimited
  int min_samples_split = 2;
};

struct ForestOptions {
  int n_trees = 100;
  std::optional<int> z_features;  ///< default floor(sqrt(n_features)), at least 1
  int max_depth = 8;
  int min_samples_split = 2;
  bool bootstrap = true;  ///< ignored by extra trees, which always use the full sample
  std::uint64_t seed = 42;
};

enum class DistanceMetric { euclidean, manhattan, minkowski, hamming };

struct KnnOptions {
  int k = 5;
  DistanceMetric metric = DistanceMetric::euclidean;
  double p = 2.0;            ///< minkowski order
  bool enforce_odd = true;   ///< even k is decremented with a warning
};

struct AdaBoostOptions {
  int n_rounds = 50;
};

LogisticOptions logistic_options(const LearnerSpec& spec);
SvmOptions svm_options(const LearnerSpec& spec);
TreeOptions tree_options(const LearnerSpec& spec);
ForestOptions forest_options(const LearnerSpec& spec);
KnnOptions knn_options(const LearnerSpec& spec);
AdaBoostOptions adaboost_options(const LearnerSpec& spec);

// ---------------------------------------------------------------------------
// Model payloads.

/// Intercept plus one coefficient per feature.
struct LinearParams {
  double bias = 0.0;
  std::vector<double> weights;

  bool operator==(const LinearParams&) const = default;
};

/// Internal node when feature >= 0 (rows with x[feature] <= threshold go left),
/// leaf otherwise.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int label = 0;          ///< majority label of the node's training rows (tie -> 0)
  double fraction = 0.0;  ///< class-1 fraction of the node's training rows

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct Tree {
  std::vector<TreeNode> nodes;  ///< nodes[0] is the root

  const TreeNode& leaf_for(std::span<const double> x) const;
  int depth() const;
  bool operator==(const Tree&) const = default;
};

struct TreeEnsemble {
  std::vector<Tree> trees;
  bool operator==(const TreeEnsemble&) const = default;
};

struct KnnParams {
  Matrix points;
  std::vector<int> labels;
  int k = 5;
  DistanceMetric metric = DistanceMetric::euclidean;
  double p = 2.0;
  bool operator==(const KnnParams&) const = default;
};

/// h(x) = polarity if x[feature] > threshold, else -polarity.
struct Stump {
  std::size_t feature = 0;
  double threshold = 0.0;
  int polarity = 1;

  int vote(std::span<const double> x) const {
    return x[feature] > threshold ? polarity : -polarity;
  }
  bool operator==(const Stump&) const = default;
};

struct BoostParams {
  std::vector<Stump> stumps;
  std::vector<double> alphas;
  bool operator==(const BoostParams&) const = default;
};

using ModelParams = std::variant<LinearParams, Tree, TreeEnsemble, KnnParams, BoostParams>;

/// A fitted classifier. predict(x) == 1 exactly when score(x) > threshold().
class TrainedModel {
 public:
  TrainedModel(LearnerSpec spec, std::size_t n_features, ModelParams params);

  const LearnerSpec& spec() const { return spec_; }
  std::size_t n_features() const { return n_features_; }
  const ModelParams& params() const { return params_; }

  /// 0.5 for probability-like scores, 0 for margins.
  double threshold() const;

  double score_row(std::span<const double> x) const;
  int predict_row(std::span<const double> x) const { return score_row(x) > threshold() ? 1 : 0; }

  std::vector<double> decision_score(const Matrix& features) const;
  std::vector<int> predict(const Matrix& features) const;

 private:
  void check_width(std::size_t width) const;

  LearnerSpec spec_;
  std::size_t n_features_;
  ModelParams params_;
};

inline std::vector<int> predict(const TrainedModel& m, const Matrix& x) { return m.predict(x); }
inline std::vector<double> decision_score(const TrainedModel& m, const Matrix& x) {
  return m.decision_score(x);
}

// ---------------------------------------------------------------------------
// Training.

/// Per-epoch objective values, recorded when a trace is passed to a trainer.
struct TrainingTrace {
  std::vector<double> losses;
};

struct BoostRound {
  Stump stump;
  double error = 0.0;
  double alpha = 0.0;
  std::vector<double> weights_before;
  std::vector<double> weights_after;
  bool kept = true;
};

struct BoostTrace {
  std::vector<BoostRound> rounds;
};

TrainedModel train_logistic(const Dataset& train, const LogisticOptions& opt = {},
                            TrainingTrace* trace = nullptr);
TrainedModel train_svm(const Dataset& train, const SvmOptions& opt = {},
                       TrainingTrace* trace = nullptr);
TrainedModel train_tree(const Dataset& train, const TreeOptions& opt = {});
TrainedModel train_forest(const Dataset& train, const ForestOptions& opt = {});
TrainedModel train_extra_trees(const Dataset& train, const ForestOptions& opt = {});
TrainedModel train_knn(const Dataset& train, const KnnOptions& opt = {});
TrainedModel train_adaboost(const Dataset& train, const AdaBoostOptions& opt = {},
                            BoostTrace* trace = nullptr);

/// Dispatches on spec.kind().
TrainedModel train(const LearnerSpec& spec, const Dataset& train);

// ---------------------------------------------------------------------------
// Objectives exposed for gradient checks.

double sigmoid(double z);

/// Mean negative log-likelihood plus (l2/2)*|w|^2 (bias unpenalized).
double logistic_loss(const LinearParams& params, const Dataset& data, double l2);
LinearParams logistic_gradient(const LinearParams& params, const Dataset& data, double l2);

/// (lambda/2)*|w|^2 + mean hinge loss, labels mapped to -1/+1.
double hinge_objective(const LinearParams& params, const Dataset& data, double lambda);
LinearParams hinge_subgradient(const LinearParams& params, const Dataset& data, double lambda);

double gini_impurity(std::span<const int> labels);

struct StumpFit {
  Stump stump;
  double error = 0.0;
};

/// Exhaustive weighted-error stump search over every feature and midpoint
/// threshold, plus a below-minimum threshold that yields a constant vote.
/// `signs` are -1/+1. Ties: lower feature, then lower threshold, then polarity +1.
StumpFit fit_stump(const Matrix& x, std::span<const int> signs, std::span<const double> weights);

/// Ordering-preserving distance (no final root) and the true distance.
double reduced_distance(std::span<const double> a, std::span<const double> b,
                        DistanceMetric metric, double p);
double distance(std::span<const double> a, std::span<const double> b, DistanceMetric metric,
                double p);

std::string_view metric_name(DistanceMetric metric);
std::optional<DistanceMetric> parse_metric(std::string_view text);

}  // namespace survml
