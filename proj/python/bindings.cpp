#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "survml/bench.hpp"
#include "survml/data.hpp"
#include "survml/eval.hpp"
#include "survml/learners.hpp"
#include "survml/model_io.hpp"
#include "survml/select.hpp"

namespace py = pybind11;
using namespace survml;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const DoubleArray& a) {
  if (a.ndim() != 2) throw ShapeError("expected a 2-D array");
  const auto rows = static_cast<std::size_t>(a.shape(0));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  return Matrix(rows, cols, std::vector<double>(a.data(), a.data() + rows * cols));
}

py::array_t<double> to_array(const Matrix& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  std::copy(m.values().begin(), m.values().end(), out.mutable_data());
  return out;
}

LearnerKind kind_from(const std::string& name) {
  auto k = parse_kind(name);
  if (!k) throw ParameterError("unknown learner '" + name + "'");
  return *k;
}

py::dict metrics_dict(const Metrics& m) {
  py::dict d;
  d["accuracy"] = m.accuracy;
  d["precision"] = m.precision;
  d["recall"] = m.recall;
  d["tpr"] = m.tpr;
  d["fpr"] = m.fpr;
  d["degenerate"] = m.degenerate();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Survival classification benchmark: seven learners, CV and metrics";
  m.attr("__version__") = std::string(kVersion);

  py::register_exception<Error>(m, "SurvmlError");
  py::register_exception<ParameterError>(m, "ParameterError");
  py::register_exception<ShapeError>(m, "ShapeError");
  py::register_exception<EvaluationError>(m, "EvaluationError");

  py::class_<Dataset>(m, "Dataset")
      .def_property_readonly("features", [](const Dataset& d) { return to_array(d.features); })
      .def_readonly("labels", &Dataset::labels)
      .def_readonly("sample_ids", &Dataset::sample_ids)
      .def_property_readonly("column_names",
                             [](const Dataset& d) {
                               std::vector<std::string> names;
                               for (const auto& c : d.columns) names.push_back(c.name);
                               return names;
                             })
      .def("__len__", &Dataset::size)
      .def_property_readonly("width", &Dataset::width);

  m.def("make_dataset",
        [](const DoubleArray& x, std::vector<int> y) { return make_dataset(to_matrix(x), std::move(y)); },
        py::arg("features"), py::arg("labels"));

  m.def(
      "encode_csv",
      [](const std::string& path, const std::string& target, std::optional<std::string> positive,
         std::optional<std::string> id_column, std::vector<std::string> drop) {
        ColumnRoles roles{target, id_column, drop};
        const RawTable table = load_csv_file(path, roles);
        EncoderOptions opt{roles, positive};
        return encode(table, fit_encoder(table, opt));
      },
      py::arg("path"), py::arg("target"), py::arg("positive") = py::none(),
      py::arg("id_column") = py::none(), py::arg("drop") = std::vector<std::string>{},
      "Load a CSV and encode it with imputation and one-hot categories fitted on the whole file.");

  m.def(
      "generate_synthetic",
      [](std::size_t n, std::size_t d, double balance, double separation, std::uint64_t seed) {
        return generate_synthetic({n, d, balance, separation, seed});
      },
      py::arg("n") = 400, py::arg("d") = 8, py::arg("balance") = 0.579,
      py::arg("separation") = 5.0, py::arg("seed") = 42);

  m.def("split", &split, py::arg("data"), py::arg("test_fraction") = 0.2, py::arg("seed") = 42,
        py::arg("stratified") = true);
  m.def("standardize", &standardize_fit_apply, py::arg("train"), py::arg("test"));

  m.def("anova_f", [](std::vector<double> col, std::vector<int> y) { return anova_f(col, y); },
        py::arg("column"), py::arg("labels"));
  m.def(
      "select_k_best",
      [](const Dataset& d, std::size_t k) {
        auto sel = select_k_best(d, k);
        std::vector<std::tuple<std::string, double, int>> scores;
        for (const auto& s : sel.scores) scores.emplace_back(s.feature_name, s.score, s.rank);
        return py::make_tuple(sel.data, scores);
      },
      py::arg("data"), py::arg("k"));

  py::class_<LearnerSpec>(m, "LearnerSpec")
      .def(py::init([](const std::string& kind, Hyperparameters hyper, std::uint64_t seed) {
             return LearnerSpec(kind_from(kind), std::move(hyper), seed);
           }),
           py::arg("kind"), py::arg("hyper") = Hyperparameters{}, py::arg("seed") = 42)
      .def_property_readonly("kind", [](const LearnerSpec& s) { return std::string(kind_name(s.kind())); })
      .def_property_readonly("seed", &LearnerSpec::seed)
      .def_property_readonly("hyper", &LearnerSpec::hyper);

  py::class_<TrainedModel>(m, "TrainedModel")
      .def_property_readonly("spec", &TrainedModel::spec)
      .def_property_readonly("n_features", &TrainedModel::n_features)
      .def_property_readonly("threshold", &TrainedModel::threshold)
      .def("predict", [](const TrainedModel& t, const DoubleArray& x) { return t.predict(to_matrix(x)); })
      .def("decision_score",
           [](const TrainedModel& t, const DoubleArray& x) { return t.decision_score(to_matrix(x)); })
      .def("save", [](const TrainedModel& t) { return save_model(t); });

  m.def("train", &train, py::arg("spec"), py::arg("data"));
  m.def("load_model", py::overload_cast<const std::string&>(&load_model), py::arg("document"));

  m.def(
      "confusion",
      [](std::vector<int> truth, std::vector<int> pred) {
        auto c = confusion(truth, pred);
        py::dict d;
        d["tp"] = c.tp;
        d["fp"] = c.fp;
        d["tn"] = c.tn;
        d["fn"] = c.fn;
        return d;
      },
      py::arg("truth"), py::arg("predicted"));
  m.def(
      "metrics",
      [](std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn) {
        return metrics_dict(metrics(ConfusionMatrix{tp, fp, tn, fn}));
      },
      py::arg("tp"), py::arg("fp"), py::arg("tn"), py::arg("fn"));
  m.def(
      "roc_curve",
      [](std::vector<int> truth, std::vector<double> scores) {
        std::vector<std::tuple<double, double, double>> pts;
        for (const auto& p : roc_curve(truth, scores).points) pts.emplace_back(p.threshold, p.fpr, p.tpr);
        return pts;
      },
      py::arg("truth"), py::arg("scores"), "List of (threshold, fpr, tpr).");
  m.def(
      "roc_auc",
      [](std::vector<int> truth, std::vector<double> scores) { return auc(roc_curve(truth, scores)); },
      py::arg("truth"), py::arg("scores"));

  m.def(
      "kfold_indices",
      [](std::size_t n, std::size_t k, std::uint64_t seed, std::optional<std::vector<int>> labels) {
        if (labels) return kfold_indices(n, k, seed, std::span<const int>(*labels));
        return kfold_indices(n, k, seed);
      },
      py::arg("n"), py::arg("k"), py::arg("seed") = 42, py::arg("labels") = py::none());

  m.def(
      "cross_validate",
      [](const LearnerSpec& spec, const Dataset& data, std::size_t k, std::uint64_t seed,
         bool stratified) {
        auto r = cross_validate(spec, data, k, seed, CvOptions{stratified, true, std::nullopt});
        py::dict d;
        d["fold_accuracies"] = r.fold_accuracies;
        d["mean"] = r.mean;
        d["stddev"] = r.stddev;
        return d;
      },
      py::arg("spec"), py::arg("data"), py::arg("k") = 10, py::arg("seed") = 42,
      py::arg("stratified") = true);

  m.def(
      "run_benchmark",
      [](const std::string& data, const std::string& target, const std::string& out,
         std::vector<std::string> models, std::uint64_t seed, double test_fraction,
         std::size_t k_folds, std::optional<std::size_t> select_k,
         std::optional<std::string> positive, std::optional<std::string> id_column,
         std::vector<std::string> drop) {
        RunConfig cfg;
        cfg.data_path = data;
        cfg.target_column = target;
        cfg.out_dir = out;
        if (!models.empty()) {
          cfg.models.clear();
          for (const auto& name : models) cfg.models.push_back(kind_from(name));
        }
        cfg.seed = seed;
        cfg.test_fraction = test_fraction;
        cfg.k_folds = k_folds;
        cfg.select_k = select_k;
        cfg.positive_value = positive;
        cfg.id_column = id_column;
        cfg.drop_columns = std::move(drop);
        const auto report = run_benchmark(cfg);
        py::list rows;
        for (const auto& r : report.models) {
          py::dict d = metrics_dict(r.test);
          d["model"] = std::string(kind_code(r.kind));
          d["train_accuracy"] = r.train_accuracy;
          d["test_accuracy"] = r.test.accuracy;
          d["auc"] = r.auc;
          d["cv_accuracies"] = r.cv.fold_accuracies;
          rows.append(d);
        }
        return rows;
      },
      py::arg("data"), py::arg("target"), py::arg("out") = "",
      py::arg("models") = std::vector<std::string>{}, py::arg("seed") = 42,
      py::arg("test_fraction") = 0.2, py::arg("k_folds") = 10, py::arg("select_k") = py::none(),
      py::arg("positive") = py::none(), py::arg("id_column") = py::none(),
      py::arg("drop") = std::vector<std::string>{});
}
