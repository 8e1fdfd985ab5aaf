#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "survml/data.hpp"
#include "survml/eval.hpp"
#include "survml/learners.hpp"
#include "survml/select.hpp"

namespace survml {

inline constexpr std::string_view kVersion = "0.1.0";

struct RunConfig {
  std::string data_path;
  std::string target_column;
  std::optional<std::string> positive_value;
  std::optional<std::string> id_column;
  std::vector<std::string> drop_columns;
  double test_fraction = 0.2;
  std::size_t k_folds = 10;
  std::optional<std::size_t> select_k;  ///< nullopt = all encoded columns
  std::vector<LearnerKind> models{kAllLearners.begin(), kAllLearners.end()};
  std::uint64_t seed = 42;
  std::string out_dir;  ///< empty = compute only, write nothing
  std::map<LearnerKind, Hyperparameters> hyper;
  bool stratify = true;

  /// Throws ParameterError for out-of-range settings or unknown hyperparameters.
  void validate() const;
};

struct ModelReport {
  LearnerKind kind;
  double train_accuracy = 0.0;
  Metrics test;  ///< accuracy/precision/recall/fpr on the holdout side
  double auc = 0.0;
  ConfusionMatrix confusion;
  RocCurve roc;
  CvResult cv;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct RunManifest {
  RunConfig config;
  std::string data_sha256;
  std::size_t n_samples = 0;
  std::size_t n_positive = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t n_encoded_features = 0;
  std::string positive_value;
  std::vector<std::string> dropped_columns;
  std::vector<StageTiming> timings;
};

struct BenchReport {
  std::vector<ModelReport> models;           ///< in kAllLearners order
  std::vector<FeatureScore> variable_scores; ///< per raw variable, rank order
  RunManifest manifest;
};

/// load -> holdout split -> encode/select/scale (train-fitted) -> train and
/// evaluate each model -> k-fold CV with per-fold refits. Writes artifacts to
/// config.out_dir when it is set; nothing is left behind on failure.
BenchReport run_benchmark(const RunConfig& config);

/// Same pipeline on an already-loaded table; `data_sha256` is echoed into the manifest.
BenchReport run_benchmark(const RawTable& table, const RunConfig& config,
                          const std::string& data_sha256);

/// Writes report.csv, cv_folds.csv, roc_<code>.csv, confusion_<code>.csv,
/// feature_scores.csv and manifest.json.
void emit_artifacts(const BenchReport& report, const std::filesystem::path& out_dir);

/// Creates the directory if needed and checks that a file can be written there.
void ensure_writable_dir(const std::filesystem::path& dir);

std::string sha256_hex(std::string_view bytes);

struct SynthConfig {
  std::size_t n = 400;
  std::size_t d = 8;
  double class1_fraction = 0.579;
  double separation = 5.0;
  std::uint64_t seed = 42;
};

/// Two unit-variance Gaussian clusters at +-separation/2 along a random unit
/// direction; round(n * class1_fraction) samples are labelled 1.
Dataset generate_synthetic(const SynthConfig& config);

/// Header x0..x{d-1},label; reals in shortest round-trip form.
void write_dataset_csv(const Dataset& data, std::ostream& out);

}  // namespace survml
