// bench: command-line driver for the seven-classifier survival benchmark.
//
//   bench run   --data <csv> --target <col> [options]   train/evaluate, write artifacts
//   bench synth --n --d --balance --sep --seed --out     write a synthetic cohort CSV
//
// Exit status: 0 success, 1 configuration error, 2 data error.

#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "survml/bench.hpp"
#include "survml/format.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitData = 2;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<survml::LearnerKind> parse_models(const std::string& text) {
  std::vector<survml::LearnerKind> out;
  for (const auto& name : split_list(text)) {
    auto kind = survml::parse_kind(name);
    if (!kind) throw ConfigError("unknown model '" + name + "'");
    if (std::find(out.begin(), out.end(), *kind) == out.end()) out.push_back(*kind);
  }
  if (out.empty()) throw ConfigError("--models is empty");
  return out;
}

// "<model>.<name>=<value>"
void add_hyper(survml::RunConfig& cfg, const std::string& item) {
  const auto dot = item.find('.');
  const auto eq = item.find('=');
  if (dot == std::string::npos || eq == std::string::npos || dot > eq) {
    throw ConfigError("--hyper expects <model>.<name>=<value>, got '" + item + "'");
  }
  auto kind = survml::parse_kind(item.substr(0, dot));
  if (!kind) throw ConfigError("unknown model in --hyper '" + item + "'");
  cfg.hyper[*kind][item.substr(dot + 1, eq - dot - 1)] = item.substr(eq + 1);
}

void print_report(const survml::BenchReport& report) {
  std::cout << std::left << std::setw(6) << "model" << std::right << std::setw(10) << "train"
            << std::setw(10) << "test" << std::setw(11) << "precision" << std::setw(10)
            << "recall" << std::setw(10) << "auc" << std::setw(10) << "cv_mean" << '\n';
  std::cout << std::fixed << std::setprecision(4);
  for (const auto& m : report.models) {
    std::cout << std::left << std::setw(6) << survml::kind_code(m.kind) << std::right
              << std::setw(10) << m.train_accuracy << std::setw(10) << m.test.accuracy
              << std::setw(11) << m.test.precision << std::setw(10) << m.test.recall
              << std::setw(10) << m.auc << std::setw(10) << m.cv.mean << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seven-classifier survival benchmark"};
  app.require_subcommand(1);

  survml::RunConfig cfg;
  std::string models = "lr,svm,dt,rf,et,knn,ada";
  std::string select_k = "all";
  std::string drop;
  std::vector<std::string> hyper;
  bool no_stratify = false;
  std::string positive;
  std::string id_column;

  auto* run = app.add_subcommand("run", "Train and evaluate the requested models");
  run->add_option("--data", cfg.data_path, "Input CSV")->required();
  run->add_option("--target", cfg.target_column, "Binary target column")->required();
  run->add_option("--positive", positive, "Target value mapped to label 1");
  run->add_option("--id-column", id_column, "Sample identifier column (not a feature)");
  run->add_option("--drop", drop, "Comma-separated columns excluded from the features");
  run->add_option("--test-fraction", cfg.test_fraction, "Holdout fraction")->capture_default_str();
  run->add_option("--k-folds", cfg.k_folds, "Cross-validation folds")->capture_default_str();
  run->add_option("--select-k", select_k, "Encoded columns kept by SelectKBest, or 'all'")
      ->capture_default_str();
  run->add_option("--models", models, "Comma-separated model codes or names")->capture_default_str();
  run->add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
  run->add_option("--out", cfg.out_dir, "Artifact directory")->required();
  run->add_option("--hyper", hyper, "<model>.<name>=<value>, repeatable");
  run->add_flag("--no-stratify", no_stratify, "Plain (unstratified) holdout and folds");

  survml::SynthConfig synth;
  std::string synth_out;
  auto* syn = app.add_subcommand("synth", "Write a synthetic two-cluster cohort as CSV");
  syn->add_option("--n", synth.n, "Samples")->capture_default_str();
  syn->add_option("--d", synth.d, "Features")->capture_default_str();
  syn->add_option("--balance", synth.class1_fraction, "Fraction labelled 1")->capture_default_str();
  syn->add_option("--sep", synth.separation, "Cluster separation")->capture_default_str();
  syn->add_option("--seed", synth.seed, "Seed")->capture_default_str();
  syn->add_option("--out", synth_out, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      if (!positive.empty()) cfg.positive_value = positive;
      if (!id_column.empty()) cfg.id_column = id_column;
      cfg.drop_columns = split_list(drop);
      cfg.models = parse_models(models);
      cfg.stratify = !no_stratify;
      if (select_k != "all") {
        auto v = survml::parse_double(select_k);
        if (!v || *v < 1 || *v != static_cast<double>(static_cast<std::size_t>(*v))) {
          throw ConfigError("--select-k expects a positive integer or 'all'");
        }
        cfg.select_k = static_cast<std::size_t>(*v);
      }
      for (const auto& h : hyper) add_hyper(cfg, h);
      cfg.validate();
      try {
        survml::ensure_writable_dir(cfg.out_dir);
      } catch (const survml::IoError& e) {
        throw ConfigError(e.what());
      }

      const auto report = survml::run_benchmark(cfg);
      print_report(report);
      std::cout << "artifacts written to " << cfg.out_dir << '\n';
    } else if (*syn) {
      const auto data = survml::generate_synthetic(synth);
      std::ofstream out(synth_out, std::ios::binary);
      if (!out) throw survml::IoError("cannot write " + synth_out);
      survml::write_dataset_csv(data, out);
      std::cout << "wrote " << data.size() << " samples (" << data.count_label(1)
                << " labelled 1) to " << synth_out << '\n';
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const survml::ParameterError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const survml::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitData;
  } catch (const survml::Error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  }
}
