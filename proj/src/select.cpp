#include <algorithm>
#include <cmath>
#include <map>

#include "survml/select.hpp"

namespace survml {

double anova_f(std::span<const double> column, std::span<const int> labels) {
  if (column.size() != labels.size()) throw ShapeError("column and labels differ in length");
  double sum[2] = {0.0, 0.0};
  std::size_t count[2] = {0, 0};
  for (std::size_t i = 0; i < column.size(); ++i) {
    if (!std::isfinite(column[i])) throw EvaluationError("anova_f: non-finite value");
    const int c = labels[i] != 0;
    sum[c] += column[i];
    ++count[c];
  }
  if (count[0] == 0 || count[1] == 0) {
    throw EvaluationError("anova_f needs both classes present");
  }
  const double n = static_cast<double>(column.size());
  const double mean0 = sum[0] / static_cast<double>(count[0]);
  const double mean1 = sum[1] / static_cast<double>(count[1]);
  const double grand = (sum[0] + sum[1]) / n;

  double ssw = 0.0;
  for (std::size_t i = 0; i < column.size(); ++i) {
    const double d = column[i] - (labels[i] != 0 ? mean1 : mean0);
    ssw += d * d;
  }
  const double ssb = static_cast<double>(count[0]) * (mean0 - grand) * (mean0 - grand) +
                     static_cast<double>(count[1]) * (mean1 - grand) * (mean1 - grand);

  // Differences of means at rounding level count as equal.
  const double scale = std::max({std::abs(mean0), std::abs(mean1), 1.0});
  if (std::abs(mean0 - mean1) <= 1e-12 * scale) return 0.0;
  if (ssw <= 0.0 || n <= 2.0) return kAnovaSeparatedSentinel;
  return std::min(ssb / (ssw / (n - 2.0)), kAnovaSeparatedSentinel);
}

std::vector<FeatureScore> rank_scores(std::vector<FeatureScore> scores) {
  std::sort(scores.begin(), scores.end(), [](const FeatureScore& a, const FeatureScore& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.feature_name < b.feature_name;
  });
  for (std::size_t i = 0; i < scores.size(); ++i) scores[i].rank = static_cast<int>(i + 1);
  return scores;
}

namespace {

std::vector<double> column_of(const Dataset& data, std::size_t j) {
  std::vector<double> col(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) col[i] = data.features(i, j);
  return col;
}

}  // namespace

Selection select_k_best(const Dataset& data, std::size_t k) {
  if (k < 1 || k > data.width()) {
    throw ParameterError("select_k_best: k = " + std::to_string(k) + " outside [1, " +
                         std::to_string(data.width()) + "]");
  }
  std::vector<FeatureScore> raw;
  std::map<std::string, std::size_t> index_of;
  for (std::size_t j = 0; j < data.width(); ++j) {
    raw.push_back({data.columns[j].name, anova_f(column_of(data, j), data.labels), 0});
    index_of[data.columns[j].name] = j;
  }
  Selection sel;
  sel.scores = rank_scores(std::move(raw));
  for (std::size_t r = 0; r < k; ++r) sel.selected.push_back(index_of.at(sel.scores[r].feature_name));
  std::sort(sel.selected.begin(), sel.selected.end());
  sel.data = data.select_columns(sel.selected);
  return sel;
}

std::vector<FeatureScore> variable_importance(const Dataset& data) {
  std::map<std::string, double> best;
  for (std::size_t j = 0; j < data.width(); ++j) {
    const double f = anova_f(column_of(data, j), data.labels);
    auto [it, inserted] = best.try_emplace(data.columns[j].source, f);
    if (!inserted) it->second = std::max(it->second, f);
  }
  std::vector<FeatureScore> out;
  for (const auto& [name, score] : best) out.push_back({name, score, 0});
  return rank_scores(std::move(out));
}

}  // namespace survml
