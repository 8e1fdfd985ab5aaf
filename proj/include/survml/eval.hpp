#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "survml/data.hpp"
#include "survml/learners.hpp"

namespace survml {

/// Positive class is label 1 (survived).
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted);

/// Threshold metrics. A 0/0 ratio is reported as 0 and flagged.
struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool fpr_undefined = false;

  bool degenerate() const { return precision_undefined || recall_undefined || fpr_undefined; }
};

Metrics metrics(const ConfusionMatrix& cm);

struct RocPoint {
  double threshold;  ///< samples with score >= threshold are positive; +inf for (0,0)
  double fpr;
  double tpr;
};

struct RocCurve {
  std::vector<RocPoint> points;  ///< starts at (0,0), ends at (1,1)
};

/// Sweeps every distinct score as a threshold, highest first.
RocCurve roc_curve(std::span<const int> truth, std::span<const double> scores);

/// Trapezoidal area under the (fpr, tpr) polyline.
double auc(const RocCurve& curve);

using FoldIndices = std::vector<std::vector<std::size_t>>;

/// Seeded k-way partition of 0..n-1. With labels, each class is dealt across
/// folds separately so per-class counts differ by at most one.
FoldIndices kfold_indices(std::size_t n, std::size_t k, std::uint64_t seed,
                          std::optional<std::span<const int>> labels = std::nullopt);

struct CvResult {
  std::vector<double> fold_accuracies;
  double mean = 0.0;
  double stddev = 0.0;  ///< population standard deviation
};

CvResult summarize_folds(std::vector<double> fold_accuracies);

/// Builds (train, validation) datasets for one fold from row positions.
using FoldPreparer = std::function<std::pair<Dataset, Dataset>(std::span<const std::size_t> train,
                                                               std::span<const std::size_t> test)>;
/// Fits on the first dataset and returns hard labels for the second.
using FitPredict = std::function<std::vector<int>(const Dataset& train, const Dataset& test)>;

/// Generic k-fold driver. Each fold's training side must contain both classes.
CvResult cross_validate_with(std::span<const int> labels, std::size_t k, std::uint64_t seed,
                             bool stratified, const FoldPreparer& prepare,
                             const FitPredict& fit_predict);

struct CvOptions {
  bool stratified = true;
  bool standardize = true;  ///< refit per fold on the training side
  std::optional<std::size_t> select_k;
};

CvResult cross_validate(const LearnerSpec& spec, const Dataset& data, std::size_t k,
                        std::uint64_t seed, const CvOptions& options = {});

}  // namespace survml
