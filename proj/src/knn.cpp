#include <algorithm>
#include <cmath>

#include "internal.hpp"
#include "survml/log.hpp"

namespace survml {

std::string_view metric_name(DistanceMetric metric) {
  switch (metric) {
    case DistanceMetric::euclidean: return "euclidean";
    case DistanceMetric::manhattan: return "manhattan";
    case DistanceMetric::minkowski: return "minkowski";
    case DistanceMetric::hamming: return "hamming";
  }
  return "euclidean";
}

std::optional<DistanceMetric> parse_metric(std::string_view text) {
  for (auto m : {DistanceMetric::euclidean, DistanceMetric::manhattan, DistanceMetric::minkowski,
                 DistanceMetric::hamming}) {
    if (text == metric_name(m)) return m;
  }
  return std::nullopt;
}

double reduced_distance(std::span<const double> a, std::span<const double> b,
                        DistanceMetric metric, double p) {
  double acc = 0.0;
  switch (metric) {
    case DistanceMetric::euclidean:
      for (std::size_t j = 0; j < a.size(); ++j) acc += (a[j] - b[j]) * (a[j] - b[j]);
      break;
    case DistanceMetric::manhattan:
      for (std::size_t j = 0; j < a.size(); ++j) acc += std::abs(a[j] - b[j]);
      break;
    case DistanceMetric::minkowski:
      for (std::size_t j = 0; j < a.size(); ++j) acc += std::pow(std::abs(a[j] - b[j]), p);
      break;
    case DistanceMetric::hamming:
      for (std::size_t j = 0; j < a.size(); ++j) acc += a[j] != b[j] ? 1.0 : 0.0;
      break;
  }
  return acc;
}

double distance(std::span<const double> a, std::span<const double> b, DistanceMetric metric,
                double p) {
  const double r = reduced_distance(a, b, metric, p);
  switch (metric) {
    case DistanceMetric::euclidean: return std::sqrt(r);
    case DistanceMetric::minkowski: return std::pow(r, 1.0 / p);
    case DistanceMetric::hamming: return a.empty() ? 0.0 : r / static_cast<double>(a.size());
    default: return r;
  }
}

TrainedModel train_knn(const Dataset& train, const KnnOptions& opt) {
  KnnOptions o = opt;
  if (o.k < 1) throw ParameterError("knn k must be at least 1");
  if (o.enforce_odd && o.k % 2 == 0) {
    warn("knn k = " + std::to_string(o.k) + " is even; using k = " + std::to_string(o.k - 1));
    o.k -= 1;
  }
  if (static_cast<std::size_t>(o.k) > train.size()) {
    throw ParameterError("knn k = " + std::to_string(o.k) + " exceeds the " +
                         std::to_string(train.size()) + " training samples");
  }
  if (o.metric == DistanceMetric::minkowski && !(o.p >= 1.0)) {
    throw ParameterError("minkowski order p must be >= 1");
  }
  KnnParams params{train.features, train.labels, o.k, o.metric, o.p};
  return TrainedModel(detail::spec_for(o), train.width(), std::move(params));
}

namespace detail {

double knn_score(const KnnParams& params, std::span<const double> x) {
  const std::size_t n = params.labels.size();
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    dist[i] = {reduced_distance(x, params.points.row(i), params.metric, params.p), i};
  }
  // Pair ordering breaks distance ties toward the lower training index.
  const auto k = static_cast<std::size_t>(params.k);
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
  std::size_t positives = 0;
  for (std::size_t j = 0; j < k; ++j) positives += static_cast<std::size_t>(params.labels[dist[j].second]);
  return static_cast<double>(positives) / static_cast<double>(k);
}

}  // namespace detail
}  // namespace survml
