#pragma once

#include <span>
#include <string>
#include <vector>

#include "survml/data.hpp"

namespace survml {

/// Returned by anova_f when the classes are perfectly separated by their means
/// (zero within-class scatter, nonzero between-class scatter).
inline constexpr double kAnovaSeparatedSentinel = 1e12;

struct FeatureScore {
  std::string feature_name;
  double score = 0.0;
  int rank = 0;  ///< 1-based; 1 = highest score, ties by ascending name
};

/// One-way ANOVA F statistic of a column between the two label groups.
/// Zero between-class scatter yields 0; throws EvaluationError for a single class.
double anova_f(std::span<const double> column, std::span<const int> labels);

/// Scores and ranks items; ranks are assigned by (score desc, name asc).
std::vector<FeatureScore> rank_scores(std::vector<FeatureScore> scores);

struct Selection {
  Dataset data;                       ///< restricted to the selected columns
  std::vector<std::size_t> selected;  ///< original column indices, ascending
  std::vector<FeatureScore> scores;   ///< every encoded column, rank order
};

Selection select_k_best(const Dataset& data, std::size_t k);

/// Per raw variable importance: the maximum F over the variable's encoded columns.
std::vector<FeatureScore> variable_importance(const Dataset& data);

}  // namespace survml
