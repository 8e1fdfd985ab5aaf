#include <fstream>
#include <sstream>

#include "survml/format.hpp"
#include "survml/model_io.hpp"

namespace survml {
namespace {

constexpr std::string_view kMagic = "survml-model";

void write_tree(std::ostream& out, const Tree& tree) {
  out << "tree " << tree.nodes.size() << '\n';
  for (const auto& n : tree.nodes) {
    out << "node " << n.feature << ' ' << format_double(n.threshold) << ' ' << n.left << ' '
        << n.right << ' ' << n.label << ' ' << format_double(n.fraction) << '\n';
  }
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) throw FormatError("model document ended unexpectedly");
    return w;
  }

  void expect(std::string_view keyword) {
    const auto w = word();
    if (w != keyword) {
      throw FormatError("expected '" + std::string(keyword) + "', found '" + w + "'");
    }
  }

  double real() {
    const auto w = word();
    auto v = parse_double(w);
    if (!v) throw FormatError("'" + w + "' is not a number");
    return *v;
  }

  long long integer() {
    const auto w = word();
    try {
      std::size_t used = 0;
      const long long v = std::stoll(w, &used);
      if (used != w.size()) throw FormatError("'" + w + "' is not an integer");
      return v;
    } catch (const std::logic_error&) {
      throw FormatError("'" + w + "' is not an integer");
    }
  }

  std::size_t count(std::size_t limit = 100'000'000) {
    const long long v = integer();
    if (v < 0 || static_cast<unsigned long long>(v) > limit) {
      throw FormatError("count out of range: " + std::to_string(v));
    }
    return static_cast<std::size_t>(v);
  }

 private:
  std::istream& in_;
};

Tree read_tree(Reader& r, std::size_t n_features) {
  r.expect("tree");
  Tree tree;
  tree.nodes.resize(r.count());
  if (tree.nodes.empty()) throw FormatError("tree has no nodes");
  const auto n_nodes = static_cast<long long>(tree.nodes.size());
  for (auto& n : tree.nodes) {
    r.expect("node");
    n.feature = static_cast<int>(r.integer());
    n.threshold = r.real();
    n.left = static_cast<int>(r.integer());
    n.right = static_cast<int>(r.integer());
    n.label = static_cast<int>(r.integer());
    n.fraction = r.real();
    if (!n.is_leaf()) {
      if (n.feature >= static_cast<long long>(n_features) || n.left <= 0 || n.right <= 0 ||
          n.left >= n_nodes || n.right >= n_nodes) {
        throw FormatError("tree node references out of range");
      }
    }
  }
  return tree;
}

}  // namespace

void save_model(const TrainedModel& model, std::ostream& out) {
  const auto& spec = model.spec();
  out << kMagic << ' ' << kModelFormatVersion << '\n';
  out << "kind " << kind_name(spec.kind()) << '\n';
  out << "seed " << spec.seed() << '\n';
  for (const auto& [name, value] : spec.hyper()) out << "hyper " << name << ' ' << value << '\n';
  out << "n_features " << model.n_features() << '\n';

  struct Writer {
    std::ostream& out;
    void operator()(const LinearParams& p) const {
      out << "linear " << p.weights.size() << ' ' << format_double(p.bias);
      for (double w : p.weights) out << ' ' << format_double(w);
      out << '\n';
    }
    void operator()(const Tree& t) const { write_tree(out, t); }
    void operator()(const TreeEnsemble& e) const {
      out << "ensemble " << e.trees.size() << '\n';
      for (const auto& t : e.trees) write_tree(out, t);
    }
    void operator()(const KnnParams& p) const {
      out << "knn " << p.k << ' ' << metric_name(p.metric) << ' ' << format_double(p.p) << ' '
          << p.points.rows() << ' ' << p.points.cols() << '\n';
      for (std::size_t i = 0; i < p.points.rows(); ++i) {
        out << "point " << p.labels[i];
        for (double v : p.points.row(i)) out << ' ' << format_double(v);
        out << '\n';
      }
    }
    void operator()(const BoostParams& p) const {
      out << "boost " << p.stumps.size() << '\n';
      for (std::size_t t = 0; t < p.stumps.size(); ++t) {
        const auto& s = p.stumps[t];
        out << "stump " << s.feature << ' ' << format_double(s.threshold) << ' ' << s.polarity
            << ' ' << format_double(p.alphas[t]) << '\n';
      }
    }
  };
  std::visit(Writer{out}, model.params());
  out << "end\n";
}

std::string save_model(const TrainedModel& model) {
  std::ostringstream os;
  save_model(model, os);
  return os.str();
}

void save_model_file(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  save_model(model, out);
  if (!out) throw IoError("failed writing " + path.string());
}

TrainedModel load_model(std::istream& in) {
  Reader r(in);
  r.expect(kMagic);
  const auto version = r.integer();
  if (version != kModelFormatVersion) {
    throw FormatError("unsupported model format version " + std::to_string(version));
  }
  r.expect("kind");
  const auto kind_text = r.word();
  const auto kind = parse_kind(kind_text);
  if (!kind) throw FormatError("unknown model kind '" + kind_text + "'");
  r.expect("seed");
  const auto seed_text = r.word();
  std::uint64_t seed = 0;
  try {
    seed = std::stoull(seed_text);
  } catch (const std::logic_error&) {
    throw FormatError("bad seed '" + seed_text + "'");
  }

  Hyperparameters hyper;
  std::string w = r.word();
  while (w == "hyper") {
    auto name = r.word();
    hyper[name] = r.word();
    w = r.word();
  }
  if (w != "n_features") throw FormatError("expected 'n_features', found '" + w + "'");
  const std::size_t p = r.count();

  LearnerSpec spec = [&] {
    try {
      return LearnerSpec(*kind, hyper, seed);
    } catch (const ParameterError& e) {
      throw FormatError(std::string("invalid hyperparameters: ") + e.what());
    }
  }();

  ModelParams params;
  switch (*kind) {
    case LearnerKind::logistic:
    case LearnerKind::svm: {
      r.expect("linear");
      LinearParams lp;
      lp.weights.resize(r.count());
      if (lp.weights.size() != p) throw FormatError("weight count does not match n_features");
      lp.bias = r.real();
      for (auto& v : lp.weights) v = r.real();
      params = std::move(lp);
      break;
    }
    case LearnerKind::tree:
      params = read_tree(r, p);
      break;
    case LearnerKind::forest:
    case LearnerKind::extra_trees: {
      r.expect("ensemble");
      TreeEnsemble e;
      e.trees.resize(r.count());
      if (e.trees.empty()) throw FormatError("ensemble has no trees");
      for (auto& t : e.trees) t = read_tree(r, p);
      params = std::move(e);
      break;
    }
    case LearnerKind::knn: {
      r.expect("knn");
      KnnParams kp;
      kp.k = static_cast<int>(r.integer());
      const auto metric_text = r.word();
      auto metric = parse_metric(metric_text);
      if (!metric) throw FormatError("unknown metric '" + metric_text + "'");
      kp.metric = *metric;
      kp.p = r.real();
      const std::size_t rows = r.count();
      const std::size_t cols = r.count();
      if (cols != p) throw FormatError("knn point width does not match n_features");
      if (kp.k < 1 || static_cast<std::size_t>(kp.k) > rows) throw FormatError("knn k out of range");
      std::vector<double> values;
      values.reserve(rows * cols);
      for (std::size_t i = 0; i < rows; ++i) {
        r.expect("point");
        kp.labels.push_back(static_cast<int>(r.integer()));
        for (std::size_t j = 0; j < cols; ++j) values.push_back(r.real());
      }
      kp.points = Matrix(rows, cols, std::move(values));
      params = std::move(kp);
      break;
    }
    case LearnerKind::adaboost: {
      r.expect("boost");
      BoostParams bp;
      const std::size_t n = r.count();
      for (std::size_t t = 0; t < n; ++t) {
        r.expect("stump");
        Stump s;
        s.feature = r.count();
        if (s.feature >= p) throw FormatError("stump feature out of range");
        s.threshold = r.real();
        s.polarity = static_cast<int>(r.integer());
        if (s.polarity != 1 && s.polarity != -1) throw FormatError("stump polarity must be +-1");
        bp.stumps.push_back(s);
        bp.alphas.push_back(r.real());
      }
      params = std::move(bp);
      break;
    }
  }
  r.expect("end");
  return TrainedModel(std::move(spec), p, std::move(params));
}

TrainedModel load_model(const std::string& document) {
  std::istringstream in(document);
  return load_model(in);
}

TrainedModel load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return load_model(in);
}

}  // namespace survml
