#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "survml/data.hpp"
#include "survml/format.hpp"
#include "survml/log.hpp"
#include "survml/random.hpp"

namespace survml {
namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

bool is_excluded(const std::string& name, const EncoderOptions& opt) {
  const auto& r = opt.roles;
  return name == r.target || (r.id_column && name == *r.id_column) ||
         std::find(r.drop.begin(), r.drop.end(), name) != r.drop.end();
}

}  // namespace

std::optional<int> TargetMapping::label_of(const Cell& cell) const {
  if (!cell) return std::nullopt;
  if (*cell == positive) return 1;
  if (negative && *cell == *negative) return 0;
  throw SchemaError("target value '" + *cell + "' was not seen when the target mapping was fitted");
}

TargetMapping fit_target(const RawTable& table, const std::string& target,
                         const std::optional<std::string>& positive_value) {
  const std::size_t col = table.column_index(target);
  std::set<std::string> values;
  for (const auto& row : table.rows) {
    if (row[col]) values.insert(*row[col]);
  }
  if (values.size() > 2) {
    throw SchemaError("target column '" + target + "' has " + std::to_string(values.size()) +
                      " distinct values; a binary target is required");
  }
  if (values.empty()) throw SchemaError("target column '" + target + "' is entirely missing");

  TargetMapping m;
  m.column = target;
  if (positive_value) {
    if (!values.contains(*positive_value)) {
      throw SchemaError("positive value '" + *positive_value + "' does not occur in '" + target + "'");
    }
    m.positive = *positive_value;
  } else {
    m.positive = *values.rbegin();
  }
  for (const auto& v : values) {
    if (v != m.positive) m.negative = v;
  }
  return m;
}

Encoder fit_encoder(const RawTable& table, const EncoderOptions& options) {
  Encoder enc;
  enc.target = fit_target(table, options.roles.target, options.positive_value);
  enc.id_column = options.roles.id_column;

  for (std::size_t c = 0; c < table.header.size(); ++c) {
    const auto& name = table.header[c];
    if (is_excluded(name, options)) continue;

    std::vector<std::string_view> present;
    for (const auto& row : table.rows) {
      if (row[c]) present.push_back(*row[c]);
    }
    if (present.empty()) {
      warn("column '" + name + "' is entirely missing and was dropped");
      enc.dropped.push_back(name);
      continue;
    }

    std::vector<double> numbers;
    bool numeric = true;
    for (auto s : present) {
      auto v = parse_double(s);
      if (!v) {
        numeric = false;
        break;
      }
      if (std::isfinite(*v)) numbers.push_back(*v);
    }

    FeatureMeta meta;
    meta.name = name;
    if (numeric) {
      if (numbers.empty()) {
        warn("column '" + name + "' has no finite values and was dropped");
        enc.dropped.push_back(name);
        continue;
      }
      auto [lo, hi] = std::minmax_element(numbers.begin(), numbers.end());
      if (*lo == *hi) {
        enc.dropped.push_back(name);
        continue;
      }
      meta.kind = FeatureKind::numeric;
      meta.impute_value = median(std::move(numbers));
    } else {
      std::map<std::string, std::size_t> counts;
      for (auto s : present) ++counts[std::string(s)];
      if (counts.size() < 2) {
        enc.dropped.push_back(name);
        continue;
      }
      meta.kind = FeatureKind::categorical;
      std::string mode;
      std::size_t best = 0;
      for (const auto& [value, n] : counts) {
        meta.categories.push_back(value);
        if (n > best) {  // strict: ties keep the lexicographically first value
          best = n;
          mode = value;
        }
      }
      meta.impute_value = mode;
    }
    enc.features.push_back(std::move(meta));
  }
  return enc;
}

Dataset encode(const RawTable& table, const Encoder& encoder) {
  const std::size_t target_col = table.column_index(encoder.target.column);
  std::optional<std::size_t> id_col;
  if (encoder.id_column) id_col = table.column_index(*encoder.id_column);

  std::vector<std::size_t> source_cols;
  std::size_t width = 0;
  Dataset out;
  for (const auto& f : encoder.features) {
    source_cols.push_back(table.column_index(f.name));
    if (f.kind == FeatureKind::numeric) {
      out.columns.push_back({f.name, f.name, false, f.scale});
      ++width;
    } else {
      for (const auto& cat : f.categories) {
        out.columns.push_back({f.name + "=" + cat, f.name, true, std::nullopt});
      }
      width += f.categories.size();
    }
  }

  std::vector<double> values;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    auto label = encoder.target.label_of(row[target_col]);
    if (!label) continue;
    out.labels.push_back(*label);
    out.sample_ids.push_back(id_col && row[*id_col] ? *row[*id_col] : std::to_string(r));

    for (std::size_t j = 0; j < encoder.features.size(); ++j) {
      const auto& f = encoder.features[j];
      const auto& cell = row[source_cols[j]];
      if (f.kind == FeatureKind::numeric) {
        double v = std::get<double>(f.impute_value);
        if (cell) {
          auto parsed = parse_double(*cell);
          if (!parsed || !std::isfinite(*parsed)) {
            throw EncodeError("row " + std::to_string(r + 1) + ", column '" + f.name +
                              "': value '" + *cell + "' is not a finite number");
          }
          v = *parsed;
        }
        values.push_back(v);
      } else {
        const std::string& value = cell ? *cell : std::get<std::string>(f.impute_value);
        for (const auto& cat : f.categories) values.push_back(cat == value ? 1.0 : 0.0);
      }
    }
  }
  out.features = Matrix(out.labels.size(), width, std::move(values));
  out.validate();
  return out;
}

void Dataset::validate() const {
  if (features.rows() != labels.size() || labels.size() != sample_ids.size()) {
    throw ShapeError("dataset row counts disagree: features " + std::to_string(features.rows()) +
                     ", labels " + std::to_string(labels.size()) + ", ids " +
                     std::to_string(sample_ids.size()));
  }
  if (columns.size() != features.cols()) throw ShapeError("column metadata does not match width");
  for (double v : features.values()) {
    if (!std::isfinite(v)) throw EncodeError("dataset contains a non-finite feature value");
  }
  for (int y : labels) {
    if (y != 0 && y != 1) throw SchemaError("labels must be 0 or 1");
  }
}

Dataset Dataset::select_rows(std::span<const std::size_t> idx) const {
  Dataset out;
  out.features = features.select_rows(idx);
  out.columns = columns;
  out.labels.reserve(idx.size());
  out.sample_ids.reserve(idx.size());
  for (auto i : idx) {
    out.labels.push_back(labels.at(i));
    out.sample_ids.push_back(sample_ids.at(i));
  }
  return out;
}

Dataset Dataset::select_columns(std::span<const std::size_t> idx) const {
  Dataset out;
  out.features = features.select_cols(idx);
  out.labels = labels;
  out.sample_ids = sample_ids;
  for (auto j : idx) out.columns.push_back(columns.at(j));
  return out;
}

std::size_t Dataset::count_label(int label) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

Dataset make_dataset(Matrix features, std::vector<int> labels) {
  Dataset d;
  for (std::size_t j = 0; j < features.cols(); ++j) {
    const auto name = "x" + std::to_string(j);
    d.columns.push_back({name, name, false, std::nullopt});
  }
  for (std::size_t i = 0; i < labels.size(); ++i) d.sample_ids.push_back(std::to_string(i));
  d.features = std::move(features);
  d.labels = std::move(labels);
  d.validate();
  return d;
}

std::pair<Dataset, Dataset> standardize_fit_apply(const Dataset& train, const Dataset& test) {
  if (train.size() == 0) throw ShapeError("cannot standardize on an empty training set");
  if (train.width() != test.width() || train.columns != test.columns) {
    throw ShapeError("train/test columns do not align (" + std::to_string(train.width()) + " vs " +
                     std::to_string(test.width()) + ")");
  }
  Dataset a = train;
  Dataset b = test;
  const std::size_t n = train.size();
  for (std::size_t j = 0; j < train.width(); ++j) {
    if (train.columns[j].one_hot) continue;
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += train.features(i, j);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = train.features(i, j) - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    if (sd < 1e-12) continue;
    for (std::size_t i = 0; i < a.size(); ++i) a.features(i, j) = (a.features(i, j) - mean) / sd;
    for (std::size_t i = 0; i < b.size(); ++i) b.features(i, j) = (b.features(i, j) - mean) / sd;
    a.columns[j].scale = b.columns[j].scale = FeatureMeta::Scale{mean, sd};
  }
  return {std::move(a), std::move(b)};
}

SplitIndices split_indices(std::span<const int> labels, double test_fraction, std::uint64_t seed,
                           bool stratified) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ParameterError("test fraction must lie in (0, 1)");
  }
  Rng rng(seed);
  SplitIndices out;

  auto take = [&](std::vector<std::size_t> pool, const std::string& what) {
    rng.shuffle(std::span(pool));
    const auto n_test = static_cast<std::size_t>(
        std::lround(static_cast<double>(pool.size()) * test_fraction));
    if (n_test < 1 || n_test + 1 > pool.size()) {
      throw SplitError("split would leave a side without any " + what + " (" +
                       std::to_string(pool.size()) + " available)");
    }
    out.test.insert(out.test.end(), pool.begin(), pool.begin() + n_test);
    out.train.insert(out.train.end(), pool.begin() + n_test, pool.end());
  };

  if (stratified) {
    for (int c : {0, 1}) {
      std::vector<std::size_t> pool;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == c) pool.push_back(i);
      }
      if (!pool.empty()) take(std::move(pool), "samples of class " + std::to_string(c));
    }
  } else {
    std::vector<std::size_t> pool(labels.size());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    take(std::move(pool), "samples");
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction, std::uint64_t seed,
                                  bool stratified) {
  auto idx = split_indices(data.labels, test_fraction, seed, stratified);
  return {data.select_rows(idx.train), data.select_rows(idx.test)};
}

}  // namespace survml
