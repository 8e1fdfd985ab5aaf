// CART decision trees and the two tree ensembles built on them.

#include <algorithm>
#include <cmath>
#include <numeric>

#include "internal.hpp"
#include "survml/random.hpp"

namespace survml {
namespace {

constexpr double kScoreTieTolerance = 1e-12;

enum class SplitMode { best_threshold, random_threshold };

struct BuildConfig {
  int max_depth = 0;
  int min_samples_split = 2;
  std::size_t features_per_node = 0;  ///< 0 = consider every feature
  SplitMode mode = SplitMode::best_threshold;
};

struct Candidate {
  double score = 0.0;
  std::size_t feature = 0;
  double threshold = 0.0;
};

// Lower weighted Gini wins; near-equal scores fall back to (feature, threshold).
bool better(const Candidate& a, const std::optional<Candidate>& b) {
  if (!b) return true;
  if (a.score < b->score - kScoreTieTolerance) return true;
  if (a.score > b->score + kScoreTieTolerance) return false;
  if (a.feature != b->feature) return a.feature < b->feature;
  return a.threshold < b->threshold;
}

double gini_from_counts(double n0, double n1) {
  const double n = n0 + n1;
  if (n <= 0) return 0.0;
  const double p0 = n0 / n;
  const double p1 = n1 / n;
  return 1.0 - p0 * p0 - p1 * p1;
}

double weighted_gini(double l0, double l1, double r0, double r1) {
  const double nl = l0 + l1;
  const double nr = r0 + r1;
  return (nl * gini_from_counts(l0, l1) + nr * gini_from_counts(r0, r1)) / (nl + nr);
}

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const int> y, BuildConfig cfg, Rng* rng)
      : x_(x), y_(y), cfg_(cfg), rng_(rng) {}

  Tree build(std::vector<std::size_t> idx) {
    grow(idx, 0);
    return std::move(tree_);
  }

 private:
  int grow(std::vector<std::size_t>& idx, int depth) {
    const auto node_id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();

    std::size_t n1 = 0;
    for (auto i : idx) n1 += static_cast<std::size_t>(y_[i]);
    const std::size_t n = idx.size();
    {
      auto& node = tree_.nodes.back();
      node.fraction = n ? static_cast<double>(n1) / static_cast<double>(n) : 0.0;
      node.label = 2 * n1 > n ? 1 : 0;
    }

    const bool pure = n1 == 0 || n1 == n;
    const bool depth_reached = cfg_.max_depth > 0 && depth >= cfg_.max_depth;
    if (pure || depth_reached || n < static_cast<std::size_t>(cfg_.min_samples_split)) {
      return node_id;
    }

    auto split = find_split(idx);
    if (!split) return node_id;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (auto i : idx) {
      (x_(i, split->feature) <= split->threshold ? left : right).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();

    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    auto& node = tree_.nodes[static_cast<std::size_t>(node_id)];
    node.feature = static_cast<int>(split->feature);
    node.threshold = split->threshold;
    node.left = l;
    node.right = r;
    return node_id;
  }

  std::vector<std::size_t> feature_order() {
    std::vector<std::size_t> order(x_.cols());
    std::iota(order.begin(), order.end(), 0);
    if (cfg_.features_per_node != 0 && cfg_.features_per_node < order.size()) {
      rng_->shuffle(std::span(order));
    }
    return order;
  }

  // Features are visited in random order until `features_per_node` of them
  // admitted at least one split; constant features do not count.
  std::optional<Candidate> find_split(const std::vector<std::size_t>& idx) {
    const std::size_t budget = cfg_.features_per_node == 0 ? x_.cols() : cfg_.features_per_node;
    std::size_t used = 0;
    std::optional<Candidate> best;
    for (auto f : feature_order()) {
      if (used == budget) break;
      auto c = cfg_.mode == SplitMode::best_threshold ? best_threshold(idx, f)
                                                      : random_threshold(idx, f);
      if (!c) continue;
      ++used;
      if (better(*c, best)) best = c;
    }
    return best;
  }

  std::optional<Candidate> best_threshold(const std::vector<std::size_t>& idx, std::size_t f) {
    scratch_.clear();
    double t0 = 0;
    double t1 = 0;
    for (auto i : idx) {
      scratch_.emplace_back(x_(i, f), y_[i]);
      (y_[i] ? t1 : t0) += 1.0;
    }
    std::sort(scratch_.begin(), scratch_.end());
    std::optional<Candidate> best;
    double l0 = 0;
    double l1 = 0;
    for (std::size_t k = 0; k + 1 < scratch_.size(); ++k) {
      (scratch_[k].second ? l1 : l0) += 1.0;
      const double a = scratch_[k].first;
      const double b = scratch_[k + 1].first;
      if (a == b) continue;
      double mid = a + (b - a) / 2.0;
      if (!(mid < b)) mid = a;
      Candidate c{weighted_gini(l0, l1, t0 - l0, t1 - l1), f, mid};
      if (better(c, best)) best = c;
    }
    return best;
  }

  std::optional<Candidate> random_threshold(const std::vector<std::size_t>& idx, std::size_t f) {
    double lo = x_(idx.front(), f);
    double hi = lo;
    for (auto i : idx) {
      lo = std::min(lo, x_(i, f));
      hi = std::max(hi, x_(i, f));
    }
    if (lo == hi) return std::nullopt;
    double thr = lo + rng_->uniform_open() * (hi - lo);
    if (!(thr < hi)) thr = lo;
    double l0 = 0, l1 = 0, r0 = 0, r1 = 0;
    for (auto i : idx) {
      const bool left = x_(i, f) <= thr;
      if (y_[i]) {
        (left ? l1 : r1) += 1.0;
      } else {
        (left ? l0 : r0) += 1.0;
      }
    }
    return Candidate{weighted_gini(l0, l1, r0, r1), f, thr};
  }

  const Matrix& x_;
  std::span<const int> y_;
  BuildConfig cfg_;
  Rng* rng_;
  Tree tree_;
  std::vector<std::pair<double, int>> scratch_;
};

void check_tree_options(int max_depth, int min_samples_split) {
  if (max_depth < 0) throw ParameterError("max_depth must be >= 0 (0 = unlimited)");
  if (min_samples_split < 2) throw ParameterError("min_samples_split must be >= 2");
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

TrainedModel train_ensemble(LearnerKind kind, const Dataset& train, const ForestOptions& opt) {
  if (train.size() == 0) throw ShapeError("tree ensemble: training set is empty");
  check_tree_options(opt.max_depth, opt.min_samples_split);
  if (opt.n_trees < 1) throw ParameterError("n_trees must be at least 1");
  const auto p = static_cast<int>(train.width());
  const int z = opt.z_features.value_or(
      std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(p))))));
  if (z < 1 || z > p) {
    throw ParameterError("z_features = " + std::to_string(z) + " outside [1, " +
                         std::to_string(p) + "]");
  }

  BuildConfig cfg;
  cfg.max_depth = opt.max_depth;
  cfg.min_samples_split = opt.min_samples_split;
  cfg.features_per_node = static_cast<std::size_t>(z);
  cfg.mode = kind == LearnerKind::forest ? SplitMode::best_threshold : SplitMode::random_threshold;
  const bool bootstrap = kind == LearnerKind::forest && opt.bootstrap;

  TreeEnsemble ensemble;
  ensemble.trees.reserve(static_cast<std::size_t>(opt.n_trees));
  for (int t = 0; t < opt.n_trees; ++t) {
    // Each tree owns a stream derived from (seed, tree index).
    Rng rng(derive_seed(opt.seed, static_cast<std::uint64_t>(t)));
    std::vector<std::size_t> idx;
    if (bootstrap) {
      idx.resize(train.size());
      for (auto& i : idx) i = rng.below(train.size());
    } else {
      idx = all_rows(train.size());
    }
    TreeBuilder builder(train.features, train.labels, cfg, &rng);
    ensemble.trees.push_back(builder.build(std::move(idx)));
  }
  return TrainedModel(detail::spec_for(kind, opt), train.width(), std::move(ensemble));
}

}  // namespace

double gini_impurity(std::span<const int> labels) {
  double n1 = 0;
  for (int y : labels) n1 += y != 0;
  return gini_from_counts(static_cast<double>(labels.size()) - n1, n1);
}

const TreeNode& Tree::leaf_for(std::span<const double> x) const {
  const TreeNode* node = &nodes.front();
  while (!node->is_leaf()) {
    node = &nodes[static_cast<std::size_t>(
        x[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left : node->right)];
  }
  return *node;
}

int Tree::depth() const {
  std::vector<std::pair<int, int>> stack = {{0, 0}};
  int deepest = 0;
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    const auto& node = nodes[static_cast<std::size_t>(id)];
    if (!node.is_leaf()) {
      stack.emplace_back(node.left, d + 1);
      stack.emplace_back(node.right, d + 1);
    }
  }
  return deepest;
}

TrainedModel train_tree(const Dataset& train, const TreeOptions& opt) {
  if (train.size() == 0) throw ShapeError("train_tree: training set is empty");
  check_tree_options(opt.max_depth, opt.min_samples_split);
  BuildConfig cfg;
  cfg.max_depth = opt.max_depth;
  cfg.min_samples_split = opt.min_samples_split;
  TreeBuilder builder(train.features, train.labels, cfg, nullptr);
  return TrainedModel(detail::spec_for(opt), train.width(), builder.build(all_rows(train.size())));
}

TrainedModel train_forest(const Dataset& train, const ForestOptions& opt) {
  return train_ensemble(LearnerKind::forest, train, opt);
}

TrainedModel train_extra_trees(const Dataset& train, const ForestOptions& opt) {
  return train_ensemble(LearnerKind::extra_trees, train, opt);
}

}  // namespace survml
