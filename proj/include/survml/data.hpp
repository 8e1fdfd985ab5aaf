#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "survml/matrix.hpp"

namespace survml {

using Cell = std::optional<std::string>;

/// Parsed CSV: header plus rows of optional cells (nullopt = missing).
struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  std::size_t column_index(const std::string& name) const;  // throws SchemaError
  std::optional<std::size_t> find_column(const std::string& name) const;
  RawTable select_rows(std::span<const std::size_t> idx) const;
};

/// Which columns play which role when loading and encoding.
struct ColumnRoles {
  std::string target;
  std::optional<std::string> id_column;
  std::vector<std::string> drop;  ///< excluded from the feature set
};

/// Loads an RFC-4180 CSV. Empty cells and NA/NaN/null (any case) become missing.
/// Throws ParseError on ragged rows, SchemaError on duplicate or missing columns.
RawTable load_csv(std::istream& source, const ColumnRoles& roles);
RawTable load_csv_file(const std::filesystem::path& path, const ColumnRoles& roles);

bool is_missing_token(std::string_view text);

enum class FeatureKind { numeric, categorical };

/// Per raw column encoding recipe, learned from training rows.
struct FeatureMeta {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
  std::vector<std::string> categories;  ///< sorted; nonempty iff categorical
  std::variant<double, std::string> impute_value;
  struct Scale {
    double mean;
    double stddev;
  };
  std::optional<Scale> scale;
};

/// Which raw target value is the positive class (label 1).
struct TargetMapping {
  std::string column;
  std::string positive;
  std::optional<std::string> negative;

  /// Returns nullopt for a missing cell; throws SchemaError for an unknown value.
  std::optional<int> label_of(const Cell& cell) const;
};

enum class ImputationPolicy { median_mode };

struct EncoderOptions {
  ColumnRoles roles;
  std::optional<std::string> positive_value;
  ImputationPolicy policy = ImputationPolicy::median_mode;
};

struct Encoder {
  std::vector<FeatureMeta> features;
  TargetMapping target;
  std::optional<std::string> id_column;
  std::vector<std::string> dropped;  ///< constant or all-missing columns
};

/// Fits imputation values, category lists and the target mapping.
/// Constant and all-missing columns are dropped (with a warning for the latter).
Encoder fit_encoder(const RawTable& table, const EncoderOptions& options);

/// Builds the target mapping alone. Default: lexicographically larger value is 1.
TargetMapping fit_target(const RawTable& table, const std::string& target,
                         const std::optional<std::string>& positive_value);

/// One encoded (model-facing) column.
struct ColumnInfo {
  std::string name;    ///< "source" for numeric, "source=category" for one-hot
  std::string source;  ///< raw variable name
  bool one_hot = false;
  std::optional<FeatureMeta::Scale> scale;

  bool operator==(const ColumnInfo& o) const {
    return name == o.name && source == o.source && one_hot == o.one_hot;
  }
};

struct Dataset {
  Matrix features;
  std::vector<int> labels;
  std::vector<ColumnInfo> columns;
  std::vector<std::string> sample_ids;

  std::size_t size() const { return labels.size(); }
  std::size_t width() const { return features.cols(); }

  /// Throws ShapeError / SchemaError if any Dataset invariant is violated.
  void validate() const;

  Dataset select_rows(std::span<const std::size_t> idx) const;
  Dataset select_columns(std::span<const std::size_t> idx) const;
  std::size_t count_label(int label) const;
};

/// Builds a Dataset with anonymous numeric columns x0..x{d-1}.
Dataset make_dataset(Matrix features, std::vector<int> labels);

/// Applies a fitted encoder. Rows with a missing target are skipped.
Dataset encode(const RawTable& table, const Encoder& encoder);

/// Standardizes numeric columns using statistics of `train` only.
std::pair<Dataset, Dataset> standardize_fit_apply(const Dataset& train, const Dataset& test);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded (optionally stratified) holdout partition over positions 0..n-1.
SplitIndices split_indices(std::span<const int> labels, double test_fraction,
                           std::uint64_t seed, bool stratified);

std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction,
                                  std::uint64_t seed, bool stratified);

}  // namespace survml
