#pragma once

#include <optional>
#include <span>
#include <vector>

#include "survml/data.hpp"
#include "survml/select.hpp"

namespace survml {

/// Preprocessing applied to every train/validation pair; statistics always
/// come from the training side only.
struct PipelineOptions {
  EncoderOptions encoder;
  bool standardize = true;
  std::optional<std::size_t> select_k;  ///< nullopt keeps every encoded column
};

struct PreparedSplit {
  Dataset train;
  Dataset test;
  std::vector<FeatureScore> column_scores;  ///< empty unless select_k was applied
};

/// Encode (fit on train rows) -> optional top-k selection -> optional scaling.
PreparedSplit prepare_split(const RawTable& raw, std::span<const std::size_t> train_rows,
                            std::span<const std::size_t> test_rows, const PipelineOptions& options);

/// Same as above for an already-numeric dataset (no encoding step).
PreparedSplit prepare_split(const Dataset& data, std::span<const std::size_t> train_rows,
                            std::span<const std::size_t> test_rows, bool standardize,
                            std::optional<std::size_t> select_k);

/// Drops rows whose target cell is missing.
RawTable drop_missing_target(const RawTable& raw, const std::string& target);

}  // namespace survml
