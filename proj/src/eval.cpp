#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "survml/eval.hpp"
#include "survml/pipeline.hpp"
#include "survml/random.hpp"

namespace survml {
namespace {

void check_binary(std::span<const int> labels, const char* what) {
  for (int v : labels) {
    if (v != 0 && v != 1) throw ShapeError(std::string(what) + " must contain only 0 and 1");
  }
}

double ratio(std::size_t num, std::size_t den, bool& undefined) {
  undefined = den == 0;
  return undefined ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) {
    throw ShapeError("confusion: " + std::to_string(truth.size()) + " labels vs " +
                     std::to_string(predicted.size()) + " predictions");
  }
  check_binary(truth, "truth");
  check_binary(predicted, "predictions");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i]) {
      ++(predicted[i] ? cm.tp : cm.fn);
    } else {
      ++(predicted[i] ? cm.fp : cm.tn);
    }
  }
  return cm;
}

Metrics metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw EvaluationError("metrics of an empty confusion matrix");
  Metrics m;
  m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
  m.precision = ratio(cm.tp, cm.tp + cm.fp, m.precision_undefined);
  m.recall = ratio(cm.tp, cm.tp + cm.fn, m.recall_undefined);
  m.tpr = m.recall;
  m.fpr = ratio(cm.fp, cm.fp + cm.tn, m.fpr_undefined);
  return m;
}

RocCurve roc_curve(std::span<const int> truth, std::span<const double> scores) {
  if (truth.size() != scores.size()) throw ShapeError("roc_curve: length mismatch");
  check_binary(truth, "truth");
  const auto pos = static_cast<std::size_t>(std::count(truth.begin(), truth.end(), 1));
  const std::size_t neg = truth.size() - pos;
  if (pos == 0 || neg == 0) throw EvaluationError("roc_curve needs both classes present");
  for (double s : scores) {
    if (std::isnan(s)) throw EvaluationError("roc_curve: NaN score");
  }

  std::vector<std::size_t> order(truth.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double thr = scores[order[k]];
    while (k < order.size() && scores[order[k]] == thr) {
      ++(truth[order[k]] ? tp : fp);
      ++k;
    }
    curve.points.push_back({thr, static_cast<double>(fp) / static_cast<double>(neg),
                            static_cast<double>(tp) / static_cast<double>(pos)});
  }
  return curve;
}

double auc(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  return area;
}

FoldIndices kfold_indices(std::size_t n, std::size_t k, std::uint64_t seed,
                          std::optional<std::span<const int>> labels) {
  if (k < 2 || k > n) {
    throw ParameterError("k = " + std::to_string(k) + " folds outside [2, " + std::to_string(n) + "]");
  }
  if (labels && labels->size() != n) throw ShapeError("kfold_indices: labels length != n");

  Rng rng(seed);
  std::vector<std::size_t> sequence;
  sequence.reserve(n);
  if (labels) {
    // Classes are laid out back to back; dealing positions round-robin then
    // balances both the fold sizes and each class's count per fold.
    for (int c : {0, 1}) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < n; ++i) {
        if (((*labels)[i] != 0) == (c == 1)) members.push_back(i);
      }
      rng.shuffle(std::span(members));
      sequence.insert(sequence.end(), members.begin(), members.end());
    }
  } else {
    sequence.resize(n);
    std::iota(sequence.begin(), sequence.end(), 0);
    rng.shuffle(std::span(sequence));
  }

  FoldIndices folds(k);
  for (std::size_t pos = 0; pos < n; ++pos) folds[pos % k].push_back(sequence[pos]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

CvResult summarize_folds(std::vector<double> fold_accuracies) {
  CvResult r;
  r.fold_accuracies = std::move(fold_accuracies);
  if (r.fold_accuracies.empty()) return r;
  const double n = static_cast<double>(r.fold_accuracies.size());
  r.mean = std::accumulate(r.fold_accuracies.begin(), r.fold_accuracies.end(), 0.0) / n;
  double ss = 0.0;
  for (double a : r.fold_accuracies) ss += (a - r.mean) * (a - r.mean);
  r.stddev = std::sqrt(ss / n);
  return r;
}

CvResult cross_validate_with(std::span<const int> labels, std::size_t k, std::uint64_t seed,
                             bool stratified, const FoldPreparer& prepare,
                             const FitPredict& fit_predict) {
  const auto folds = stratified ? kfold_indices(labels.size(), k, seed, labels)
                                : kfold_indices(labels.size(), k, seed);
  std::vector<double> accuracies;
  accuracies.reserve(k);
  std::vector<char> held_out(labels.size(), 0);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::fill(held_out.begin(), held_out.end(), 0);
    for (auto i : folds[f]) held_out[i] = 1;
    std::vector<std::size_t> train_rows;
    std::size_t positives = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (!held_out[i]) {
        train_rows.push_back(i);
        positives += labels[i] != 0;
      }
    }
    if (positives == 0 || positives == train_rows.size()) {
      throw EvaluationError("fold " + std::to_string(f) + ": training side has a single class");
    }
    auto [train, test] = prepare(train_rows, folds[f]);
    const auto predicted = fit_predict(train, test);
    accuracies.push_back(metrics(confusion(test.labels, predicted)).accuracy);
  }
  return summarize_folds(std::move(accuracies));
}

CvResult cross_validate(const LearnerSpec& spec, const Dataset& data, std::size_t k,
                        std::uint64_t seed, const CvOptions& options) {
  auto prepare = [&](std::span<const std::size_t> tr, std::span<const std::size_t> te) {
    auto s = prepare_split(data, tr, te, options.standardize, options.select_k);
    return std::pair{std::move(s.train), std::move(s.test)};
  };
  auto fit_predict = [&](const Dataset& train_set, const Dataset& test_set) {
    return train(spec, train_set).predict(test_set.features);
  };
  return cross_validate_with(data.labels, k, seed, options.stratified, prepare, fit_predict);
}

}  // namespace survml
