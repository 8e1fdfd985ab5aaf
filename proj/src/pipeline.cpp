#include "survml/pipeline.hpp"

namespace survml {
namespace {

PreparedSplit finish(Dataset train, Dataset test, bool standardize,
                     std::optional<std::size_t> select_k) {
  PreparedSplit out;
  if (select_k) {
    auto sel = select_k_best(train, *select_k);
    out.column_scores = std::move(sel.scores);
    test = test.select_columns(sel.selected);
    train = std::move(sel.data);
  }
  if (standardize) {
    std::tie(train, test) = standardize_fit_apply(train, test);
  }
  out.train = std::move(train);
  out.test = std::move(test);
  return out;
}

}  // namespace

RawTable drop_missing_target(const RawTable& raw, const std::string& target) {
  const std::size_t col = raw.column_index(target);
  RawTable out;
  out.header = raw.header;
  for (const auto& row : raw.rows) {
    if (row[col]) out.rows.push_back(row);
  }
  return out;
}

PreparedSplit prepare_split(const RawTable& raw, std::span<const std::size_t> train_rows,
                            std::span<const std::size_t> test_rows, const PipelineOptions& options) {
  const RawTable train_table = raw.select_rows(train_rows);
  const Encoder encoder = fit_encoder(train_table, options.encoder);
  return finish(encode(train_table, encoder), encode(raw.select_rows(test_rows), encoder),
                options.standardize, options.select_k);
}

PreparedSplit prepare_split(const Dataset& data, std::span<const std::size_t> train_rows,
                            std::span<const std::size_t> test_rows, bool standardize,
                            std::optional<std::size_t> select_k) {
  return finish(data.select_rows(train_rows), data.select_rows(test_rows), standardize, select_k);
}

}  // namespace survml
