#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "survml/bench.hpp"
#include "survml/format.hpp"
#include "survml/pipeline.hpp"
#include "survml/random.hpp"

namespace survml {
namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
auto with_stage(const std::string& stage, F&& f) {
  try {
    return f();
  } catch (Error& e) {
    e.add_context(stage);
    throw;
  }
}

class StageTimer {
 public:
  explicit StageTimer(std::vector<StageTiming>& sink) : sink_(sink) {}

  template <typename F>
  auto run(const std::string& stage, F&& f) {
    const auto start = Clock::now();
    struct Record {
      StageTimer* self;
      std::string stage;
      Clock::time_point start;
      ~Record() {
        self->sink_.push_back(
            {stage, std::chrono::duration<double>(Clock::now() - start).count()});
      }
    } record{this, stage, start};
    return with_stage(stage, std::forward<F>(f));
  }

 private:
  std::vector<StageTiming>& sink_;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open data file " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nlohmann::ordered_json config_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["data_path"] = c.data_path;
  j["target_column"] = c.target_column;
  j["positive_value"] = c.positive_value ? nlohmann::ordered_json(*c.positive_value) : nullptr;
  j["id_column"] = c.id_column ? nlohmann::ordered_json(*c.id_column) : nullptr;
  j["drop_columns"] = c.drop_columns;
  j["test_fraction"] = c.test_fraction;
  j["holdout"] = c.stratify ? "stratified" : "random";
  j["k_folds"] = c.k_folds;
  j["cv_stratified"] = c.stratify;
  j["select_k"] = c.select_k ? nlohmann::ordered_json(*c.select_k) : nlohmann::ordered_json("all");
  std::vector<std::string> models;
  for (auto k : c.models) models.emplace_back(kind_code(k));
  j["models"] = models;
  j["seed"] = c.seed;
  nlohmann::ordered_json hyper = nlohmann::ordered_json::object();
  for (const auto& [kind, h] : c.hyper) {
    for (const auto& [name, value] : h) hyper[std::string(kind_code(kind)) + "." + name] = value;
  }
  j["hyper"] = hyper;
  return j;
}

}  // namespace

void RunConfig::validate() const {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ParameterError("test fraction must lie in (0, 1)");
  }
  if (k_folds < 2) throw ParameterError("k-folds must be at least 2");
  if (models.empty()) throw ParameterError("no models requested");
  if (target_column.empty()) throw ParameterError("a target column is required");
  if (select_k && *select_k < 1) throw ParameterError("select-k must be positive or 'all'");
  for (const auto& [kind, h] : hyper) LearnerSpec(kind, h, seed);
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("SHA-256 computation failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

void ensure_writable_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  const auto probe = dir / ".survml_write_probe";
  {
    std::ofstream out(probe);
    if (!out || !(out << "ok")) throw IoError("output directory " + dir.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);
}

BenchReport run_benchmark(const RunConfig& config) {
  config.validate();
  if (!config.out_dir.empty()) ensure_writable_dir(config.out_dir);

  const std::string bytes = read_file(config.data_path);
  const RawTable table = with_stage("load", [&] {
    ColumnRoles roles{config.target_column, config.id_column, config.drop_columns};
    std::istringstream in(bytes);
    return load_csv(in, roles);
  });
  BenchReport report = run_benchmark(table, config, sha256_hex(bytes));
  if (!config.out_dir.empty()) with_stage("emit", [&] { emit_artifacts(report, config.out_dir); });
  return report;
}

BenchReport run_benchmark(const RawTable& table_in, const RunConfig& config,
                          const std::string& data_sha256) {
  config.validate();
  BenchReport report;
  RunManifest& man = report.manifest;
  man.config = config;
  man.data_sha256 = data_sha256;
  StageTimer timer(man.timings);

  // Target mapping is fixed once from the whole column so that every fold
  // agrees on which value is the positive class.
  const RawTable table =
      with_stage("target", [&] { return drop_missing_target(table_in, config.target_column); });
  const TargetMapping mapping = with_stage("target", [&] {
    return fit_target(table, config.target_column, config.positive_value);
  });
  const std::size_t target_col = table.column_index(config.target_column);
  std::vector<int> labels;
  labels.reserve(table.rows.size());
  for (const auto& row : table.rows) labels.push_back(*mapping.label_of(row[target_col]));

  man.positive_value = mapping.positive;
  man.n_samples = labels.size();
  man.n_positive = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));

  PipelineOptions pipeline;
  pipeline.encoder.roles = {config.target_column, config.id_column, config.drop_columns};
  pipeline.encoder.positive_value = mapping.positive;
  pipeline.select_k = config.select_k;

  const SplitIndices holdout = with_stage("split", [&] {
    return split_indices(labels, config.test_fraction, config.seed, config.stratify);
  });
  man.n_train = holdout.train.size();
  man.n_test = holdout.test.size();

  PreparedSplit prepared = timer.run("preprocess", [&] {
    const RawTable train_table = table.select_rows(holdout.train);
    const Encoder enc = fit_encoder(train_table, pipeline.encoder);
    man.dropped_columns = enc.dropped;
    report.variable_scores = variable_importance(encode(train_table, enc));
    return prepare_split(table, holdout.train, holdout.test, pipeline);
  });
  man.n_encoded_features = prepared.train.width();

  std::vector<LearnerKind> kinds;
  for (auto k : kAllLearners) {
    if (std::find(config.models.begin(), config.models.end(), k) != config.models.end()) {
      kinds.push_back(k);
    }
  }

  for (auto kind : kinds) {
    auto it = config.hyper.find(kind);
    const LearnerSpec spec(kind, it == config.hyper.end() ? Hyperparameters{} : it->second,
                           config.seed);
    const std::string code(kind_code(kind));
    ModelReport mr;
    mr.kind = kind;

    timer.run("holdout:" + code, [&] {
      const TrainedModel model = train(spec, prepared.train);
      mr.train_accuracy =
          metrics(confusion(prepared.train.labels, model.predict(prepared.train.features))).accuracy;
      const auto scores = model.decision_score(prepared.test.features);
      std::vector<int> predicted(scores.size());
      for (std::size_t i = 0; i < scores.size(); ++i) {
        predicted[i] = scores[i] > model.threshold() ? 1 : 0;
      }
      mr.confusion = confusion(prepared.test.labels, predicted);
      mr.test = metrics(mr.confusion);
      mr.roc = roc_curve(prepared.test.labels, scores);
      mr.auc = auc(mr.roc);
      return 0;
    });

    timer.run("cv:" + code, [&] {
      auto prepare = [&](std::span<const std::size_t> tr, std::span<const std::size_t> te) {
        auto s = prepare_split(table, tr, te, pipeline);
        return std::pair{std::move(s.train), std::move(s.test)};
      };
      auto fit_predict = [&](const Dataset& a, const Dataset& b) {
        return train(spec, a).predict(b.features);
      };
      mr.cv = cross_validate_with(labels, config.k_folds, config.seed, config.stratify, prepare,
                                  fit_predict);
      return 0;
    });
    report.models.push_back(std::move(mr));
  }
  return report;
}

void emit_artifacts(const BenchReport& report, const std::filesystem::path& out_dir) {
  ensure_writable_dir(out_dir);
  std::vector<std::filesystem::path> written;
  auto write = [&](const std::string& name, const std::string& content) {
    const auto path = out_dir / name;
    std::ofstream out(path, std::ios::binary);
    written.push_back(path);
    if (!out || !(out << content) || !out.flush()) throw IoError("failed writing " + path.string());
  };

  try {
    std::ostringstream rep;
    rep << "model,train_accuracy,test_accuracy,precision,recall,auc,fpr,cv_mean,cv_stddev\n";
    std::ostringstream folds;
    folds << "model,fold,accuracy\n";
    for (const auto& m : report.models) {
      const std::string code(kind_code(m.kind));
      rep << code << ',' << format_double(m.train_accuracy) << ','
          << format_double(m.test.accuracy) << ',' << format_double(m.test.precision) << ','
          << format_double(m.test.recall) << ',' << format_double(m.auc) << ','
          << format_double(m.test.fpr) << ',' << format_double(m.cv.mean) << ','
          << format_double(m.cv.stddev) << '\n';
      for (std::size_t f = 0; f < m.cv.fold_accuracies.size(); ++f) {
        folds << code << ',' << f + 1 << ',' << format_double(m.cv.fold_accuracies[f]) << '\n';
      }

      std::ostringstream roc;
      roc << "threshold,fpr,tpr\n";
      for (const auto& p : m.roc.points) {
        roc << format_double(p.threshold) << ',' << format_double(p.fpr) << ','
            << format_double(p.tpr) << '\n';
      }
      write("roc_" + code + ".csv", roc.str());

      std::ostringstream cm;
      cm << "tp,fp,tn,fn\n"
         << m.confusion.tp << ',' << m.confusion.fp << ',' << m.confusion.tn << ','
         << m.confusion.fn << '\n';
      write("confusion_" + code + ".csv", cm.str());
    }
    write("report.csv", rep.str());
    write("cv_folds.csv", folds.str());

    std::ostringstream scores;
    scores << "feature,score,rank\n";
    for (const auto& s : report.variable_scores) {
      scores << s.feature_name << ',' << format_double(s.score) << ',' << s.rank << '\n';
    }
    write("feature_scores.csv", scores.str());

    const auto& man = report.manifest;
    nlohmann::ordered_json j;
    j["tool"] = "survml-bench";
    j["version"] = std::string(kVersion);
    j["model_format_version"] = 1;
    j["config"] = config_json(man.config);
    j["data"] = {{"sha256", man.data_sha256},
                 {"samples", man.n_samples},
                 {"positives", man.n_positive},
                 {"positive_value", man.positive_value},
                 {"train_samples", man.n_train},
                 {"test_samples", man.n_test},
                 {"encoded_features", man.n_encoded_features},
                 {"dropped_columns", man.dropped_columns}};
    nlohmann::ordered_json timings = nlohmann::ordered_json::object();
    for (const auto& t : man.timings) timings[t.stage] = t.seconds;
    j["timings_seconds"] = timings;
    write("manifest.json", j.dump(2) + "\n");
  } catch (...) {
    std::error_code ec;
    for (const auto& p : written) std::filesystem::remove(p, ec);
    throw;
  }
}

Dataset generate_synthetic(const SynthConfig& c) {
  if (!(c.class1_fraction > 0.0 && c.class1_fraction < 1.0)) {
    throw ParameterError("class1_fraction must lie in (0, 1)");
  }
  if (c.d < 1) throw ParameterError("synthetic data needs at least one feature");
  if (!(c.separation >= 0.0) || !std::isfinite(c.separation)) {
    throw ParameterError("separation must be a finite nonnegative number");
  }
  const auto n1 = static_cast<std::size_t>(std::lround(static_cast<double>(c.n) * c.class1_fraction));
  if (n1 == 0 || n1 == c.n) {
    throw ParameterError("n = " + std::to_string(c.n) + " leaves one class empty at fraction " +
                         format_double(c.class1_fraction));
  }

  Rng rng(c.seed);
  std::vector<double> direction(c.d);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (auto& v : direction) {
      v = rng.normal();
      norm += v * v;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (auto& v : direction) v /= norm;

  std::vector<int> labels(c.n, 0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n1), 1);
  rng.shuffle(std::span(labels));

  Matrix x(c.n, c.d);
  for (std::size_t i = 0; i < c.n; ++i) {
    const double offset = (labels[i] ? 0.5 : -0.5) * c.separation;
    for (std::size_t j = 0; j < c.d; ++j) x(i, j) = offset * direction[j] + rng.normal();
  }
  return make_dataset(std::move(x), std::move(labels));
}

void write_dataset_csv(const Dataset& data, std::ostream& out) {
  for (const auto& col : data.columns) out << col.name << ',';
  out << "label\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.features.row(i)) out << format_double(v) << ',';
    out << data.labels[i] << '\n';
  }
}

}  // namespace survml
