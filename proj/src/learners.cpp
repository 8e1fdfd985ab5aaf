#include <algorithm>
#include <cmath>

#include "survml/format.hpp"
#include "survml/learners.hpp"
#include "internal.hpp"

namespace survml {
namespace {

struct KindNames {
  LearnerKind kind;
  std::string_view name;
  std::string_view code;
};

constexpr std::array<KindNames, 7> kNames = {{
    {LearnerKind::logistic, "logistic", "lr"},
    {LearnerKind::svm, "svm", "svm"},
    {LearnerKind::tree, "tree", "dt"},
    {LearnerKind::forest, "forest", "rf"},
    {LearnerKind::extra_trees, "extra_trees", "et"},
    {LearnerKind::knn, "knn", "knn"},
    {LearnerKind::adaboost, "adaboost", "ada"},
}};

const KindNames& names_of(LearnerKind kind) {
  for (const auto& n : kNames) {
    if (n.kind == kind) return n;
  }
  throw ParameterError("unknown learner kind");
}

int integer_hyper(const LearnerSpec& spec, const std::string& name, int fallback) {
  const double v = spec.number_or(name, fallback);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw ParameterError(std::string(kind_name(spec.kind())) + "." + name + " must be an integer");
  }
  return static_cast<int>(v);
}

std::uint64_t seed_of(const LearnerSpec& spec) {
  auto it = spec.hyper().find("seed");
  if (it == spec.hyper().end()) return spec.seed();
  const double v = *parse_double(it->second);
  if (v < 0 || v != std::floor(v)) throw ParameterError("seed must be a nonnegative integer");
  return static_cast<std::uint64_t>(v);
}

}  // namespace

std::string_view kind_name(LearnerKind kind) { return names_of(kind).name; }
std::string_view kind_code(LearnerKind kind) { return names_of(kind).code; }

std::optional<LearnerKind> parse_kind(std::string_view text) {
  for (const auto& n : kNames) {
    if (text == n.name || text == n.code) return n.kind;
  }
  return std::nullopt;
}

const std::vector<std::string>& LearnerSpec::allowed_names(LearnerKind kind) {
  static const std::map<LearnerKind, std::vector<std::string>> allowed = {
      {LearnerKind::logistic, {"learning_rate", "epochs", "l2"}},
      {LearnerKind::svm, {"lambda", "epochs", "seed"}},
      {LearnerKind::tree, {"max_depth", "min_samples_split"}},
      {LearnerKind::forest,
       {"n_trees", "z_features", "max_depth", "min_samples_split", "bootstrap", "seed"}},
      {LearnerKind::extra_trees, {"n_trees", "z_features", "max_depth", "min_samples_split", "seed"}},
      {LearnerKind::knn, {"k", "metric", "p", "enforce_odd"}},
      {LearnerKind::adaboost, {"n_rounds"}},
  };
  return allowed.at(kind);
}

LearnerSpec::LearnerSpec(LearnerKind kind, Hyperparameters hyper, std::uint64_t seed)
    : kind_(kind), hyper_(std::move(hyper)), seed_(seed) {
  const auto& allowed = allowed_names(kind_);
  for (const auto& [name, value] : hyper_) {
    if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
      throw ParameterError("unknown hyperparameter '" + name + "' for " +
                           std::string(kind_name(kind_)));
    }
    if (value.empty() || value.find_first_of(" \t\r\n") != std::string::npos) {
      throw ParameterError("hyperparameter '" + name + "' has an empty or blank-containing value");
    }
    if (name == "metric") {
      if (!parse_metric(value)) throw ParameterError("unknown distance metric '" + value + "'");
    } else if (name == "z_features" && value == "sqrt") {
      // symbolic default
    } else if (!parse_double(value)) {
      throw ParameterError("hyperparameter '" + name + "' expects a number, got '" + value + "'");
    }
  }
}

double LearnerSpec::number_or(const std::string& name, double fallback) const {
  auto it = hyper_.find(name);
  if (it == hyper_.end()) return fallback;
  return parse_double(it->second).value_or(fallback);
}

std::string LearnerSpec::text_or(const std::string& name, const std::string& fallback) const {
  auto it = hyper_.find(name);
  return it == hyper_.end() ? fallback : it->second;
}

LogisticOptions logistic_options(const LearnerSpec& spec) {
  LogisticOptions o;
  o.learning_rate = spec.number_or("learning_rate", o.learning_rate);
  o.epochs = integer_hyper(spec, "epochs", o.epochs);
  o.l2 = spec.number_or("l2", o.l2);
  return o;
}

SvmOptions svm_options(const LearnerSpec& spec) {
  SvmOptions o;
  o.lambda = spec.number_or("lambda", o.lambda);
  o.epochs = integer_hyper(spec, "epochs", o.epochs);
  o.seed = seed_of(spec);
  return o;
}

TreeOptions tree_options(const LearnerSpec& spec) {
  TreeOptions o;
  o.max_depth = integer_hyper(spec, "max_depth", o.max_depth);
  o.min_samples_split = integer_hyper(spec, "min_samples_split", o.min_samples_split);
  return o;
}

ForestOptions forest_options(const LearnerSpec& spec) {
  ForestOptions o;
  o.n_trees = integer_hyper(spec, "n_trees", o.n_trees);
  if (spec.text_or("z_features", "sqrt") != "sqrt") o.z_features = integer_hyper(spec, "z_features", 0);
  o.max_depth = integer_hyper(spec, "max_depth", o.max_depth);
  o.min_samples_split = integer_hyper(spec, "min_samples_split", o.min_samples_split);
  o.bootstrap = integer_hyper(spec, "bootstrap", 1) != 0;
  o.seed = seed_of(spec);
  return o;
}

KnnOptions knn_options(const LearnerSpec& spec) {
  KnnOptions o;
  o.k = integer_hyper(spec, "k", o.k);
  o.metric = *parse_metric(spec.text_or("metric", "euclidean"));
  o.p = spec.number_or("p", o.p);
  o.enforce_odd = integer_hyper(spec, "enforce_odd", 1) != 0;
  return o;
}

AdaBoostOptions adaboost_options(const LearnerSpec& spec) {
  AdaBoostOptions o;
  o.n_rounds = integer_hyper(spec, "n_rounds", o.n_rounds);
  return o;
}

namespace detail {

LearnerSpec spec_for(const LogisticOptions& o) {
  return LearnerSpec(LearnerKind::logistic, {{"learning_rate", format_double(o.learning_rate)},
                                             {"epochs", std::to_string(o.epochs)},
                                             {"l2", format_double(o.l2)}});
}

LearnerSpec spec_for(const SvmOptions& o) {
  return LearnerSpec(LearnerKind::svm,
                     {{"lambda", format_double(o.lambda)}, {"epochs", std::to_string(o.epochs)}},
                     o.seed);
}

LearnerSpec spec_for(const TreeOptions& o) {
  return LearnerSpec(LearnerKind::tree, {{"max_depth", std::to_string(o.max_depth)},
                                         {"min_samples_split", std::to_string(o.min_samples_split)}});
}

LearnerSpec spec_for(LearnerKind kind, const ForestOptions& o) {
  Hyperparameters h = {{"n_trees", std::to_string(o.n_trees)},
                       {"z_features", o.z_features ? std::to_string(*o.z_features) : "sqrt"},
                       {"max_depth", std::to_string(o.max_depth)},
                       {"min_samples_split", std::to_string(o.min_samples_split)}};
  if (kind == LearnerKind::forest) h["bootstrap"] = o.bootstrap ? "1" : "0";
  return LearnerSpec(kind, std::move(h), o.seed);
}

LearnerSpec spec_for(const KnnOptions& o) {
  return LearnerSpec(LearnerKind::knn, {{"k", std::to_string(o.k)},
                                        {"metric", std::string(metric_name(o.metric))},
                                        {"p", format_double(o.p)},
                                        {"enforce_odd", o.enforce_odd ? "1" : "0"}});
}

LearnerSpec spec_for(const AdaBoostOptions& o) {
  return LearnerSpec(LearnerKind::adaboost, {{"n_rounds", std::to_string(o.n_rounds)}});
}

}  // namespace detail

TrainedModel train(const LearnerSpec& spec, const Dataset& data) {
  auto rebind = [&](TrainedModel m) {
    return TrainedModel(spec, m.n_features(), m.params());
  };
  switch (spec.kind()) {
    case LearnerKind::logistic:
      return rebind(train_logistic(data, logistic_options(spec)));
    case LearnerKind::svm:
      return rebind(train_svm(data, svm_options(spec)));
    case LearnerKind::tree:
      return rebind(train_tree(data, tree_options(spec)));
    case LearnerKind::forest:
      return rebind(train_forest(data, forest_options(spec)));
    case LearnerKind::extra_trees:
      return rebind(train_extra_trees(data, forest_options(spec)));
    case LearnerKind::knn:
      return rebind(train_knn(data, knn_options(spec)));
    case LearnerKind::adaboost:
      return rebind(train_adaboost(data, adaboost_options(spec)));
  }
  throw ParameterError("unknown learner kind");
}

// ---------------------------------------------------------------------------

TrainedModel::TrainedModel(LearnerSpec spec, std::size_t n_features, ModelParams params)
    : spec_(std::move(spec)), n_features_(n_features), params_(std::move(params)) {}

double TrainedModel::threshold() const {
  switch (spec_.kind()) {
    case LearnerKind::svm:
    case LearnerKind::adaboost:
      return 0.0;
    default:
      return 0.5;
  }
}

void TrainedModel::check_width(std::size_t width) const {
  if (width != n_features_) {
    throw ShapeError("model expects " + std::to_string(n_features_) + " features, got " +
                     std::to_string(width));
  }
}

double TrainedModel::score_row(std::span<const double> x) const {
  check_width(x.size());
  struct Visitor {
    std::span<const double> x;
    LearnerKind kind;

    double operator()(const LinearParams& p) const {
      double z = p.bias;
      for (std::size_t j = 0; j < x.size(); ++j) z += p.weights[j] * x[j];
      return kind == LearnerKind::logistic ? sigmoid(z) : z;
    }
    double operator()(const Tree& t) const { return t.leaf_for(x).fraction; }
    double operator()(const TreeEnsemble& e) const {
      std::size_t votes = 0;
      for (const auto& t : e.trees) votes += static_cast<std::size_t>(t.leaf_for(x).label);
      return static_cast<double>(votes) / static_cast<double>(e.trees.size());
    }
    double operator()(const KnnParams& p) const { return detail::knn_score(p, x); }
    double operator()(const BoostParams& p) const {
      double s = 0.0;
      for (std::size_t t = 0; t < p.stumps.size(); ++t) s += p.alphas[t] * p.stumps[t].vote(x);
      return s;
    }
  };
  return std::visit(Visitor{x, spec_.kind()}, params_);
}

std::vector<double> TrainedModel::decision_score(const Matrix& features) const {
  check_width(features.cols());
  std::vector<double> out(features.rows());
  for (std::size_t i = 0; i < features.rows(); ++i) out[i] = score_row(features.row(i));
  return out;
}

std::vector<int> TrainedModel::predict(const Matrix& features) const {
  check_width(features.cols());
  std::vector<int> out(features.rows());
  for (std::size_t i = 0; i < features.rows(); ++i) out[i] = predict_row(features.row(i));
  return out;
}

}  // namespace survml
