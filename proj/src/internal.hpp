#pragma once

#include <span>

#include "survml/learners.hpp"

namespace survml::detail {

double knn_score(const KnnParams& params, std::span<const double> x);

LearnerSpec spec_for(const LogisticOptions& o);
LearnerSpec spec_for(const SvmOptions& o);
LearnerSpec spec_for(const TreeOptions& o);
LearnerSpec spec_for(LearnerKind kind, const ForestOptions& o);
LearnerSpec spec_for(const KnnOptions& o);
LearnerSpec spec_for(const AdaBoostOptions& o);

}  // namespace survml::detail
