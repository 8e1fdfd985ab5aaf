// Logistic regression (full-batch gradient descent) and linear SVM
// (stochastic subgradient descent on the primal hinge objective).

#include <cmath>
#include <numeric>

#include "internal.hpp"
#include "survml/format.hpp"
#include "survml/random.hpp"

namespace survml {
namespace {

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double linear_response(const LinearParams& p, std::span<const double> x) {
  double z = p.bias;
  for (std::size_t j = 0; j < x.size(); ++j) z += p.weights[j] * x[j];
  return z;
}

double squared_norm(const std::vector<double>& w) {
  return std::inner_product(w.begin(), w.end(), w.begin(), 0.0);
}

void require_nonempty(const Dataset& d, const char* who) {
  if (d.size() == 0) throw ShapeError(std::string(who) + ": training set is empty");
}

}  // namespace

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double logistic_loss(const LinearParams& params, const Dataset& data, double l2) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double z = linear_response(params, data.features.row(i));
    total += softplus(z) - data.labels[i] * z;
  }
  return total / static_cast<double>(data.size()) + 0.5 * l2 * squared_norm(params.weights);
}

LinearParams logistic_gradient(const LinearParams& params, const Dataset& data, double l2) {
  LinearParams g{0.0, std::vector<double>(params.weights.size(), 0.0)};
  const double inv_n = 1.0 / static_cast<double>(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto x = data.features.row(i);
    const double r = sigmoid(linear_response(params, x)) - data.labels[i];
    g.bias += r;
    for (std::size_t j = 0; j < x.size(); ++j) g.weights[j] += r * x[j];
  }
  g.bias *= inv_n;
  for (std::size_t j = 0; j < g.weights.size(); ++j) {
    g.weights[j] = g.weights[j] * inv_n + l2 * params.weights[j];
  }
  return g;
}

TrainedModel train_logistic(const Dataset& train, const LogisticOptions& opt,
                            TrainingTrace* trace) {
  require_nonempty(train, "train_logistic");
  if (!(opt.learning_rate > 0.0)) throw ParameterError("logistic learning_rate must be positive");
  if (opt.epochs < 0) throw ParameterError("logistic epochs must be nonnegative");
  if (opt.l2 < 0.0) throw ParameterError("logistic l2 must be nonnegative");

  LinearParams p{0.0, std::vector<double>(train.width(), 0.0)};
  if (trace) trace->losses.push_back(logistic_loss(p, train, opt.l2));
  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    const LinearParams g = logistic_gradient(p, train, opt.l2);
    p.bias -= opt.learning_rate * g.bias;
    for (std::size_t j = 0; j < p.weights.size(); ++j) p.weights[j] -= opt.learning_rate * g.weights[j];

    const double loss = logistic_loss(p, train, opt.l2);
    if (!std::isfinite(loss)) {
      throw DivergenceError("logistic regression diverged at epoch " + std::to_string(epoch + 1) +
                            " with learning_rate " + format_double(opt.learning_rate));
    }
    if (trace) trace->losses.push_back(loss);
  }
  return TrainedModel(detail::spec_for(opt), train.width(), std::move(p));
}

double hinge_objective(const LinearParams& params, const Dataset& data, double lambda) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double y = data.labels[i] ? 1.0 : -1.0;
    total += std::max(0.0, 1.0 - y * linear_response(params, data.features.row(i)));
  }
  return 0.5 * lambda * squared_norm(params.weights) + total / static_cast<double>(data.size());
}

LinearParams hinge_subgradient(const LinearParams& params, const Dataset& data, double lambda) {
  LinearParams g{0.0, std::vector<double>(params.weights.size(), 0.0)};
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto x = data.features.row(i);
    const double y = data.labels[i] ? 1.0 : -1.0;
    if (y * linear_response(params, x) < 1.0) {
      g.bias -= y;
      for (std::size_t j = 0; j < x.size(); ++j) g.weights[j] -= y * x[j];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(data.size());
  g.bias *= inv_n;
  for (std::size_t j = 0; j < g.weights.size(); ++j) {
    g.weights[j] = g.weights[j] * inv_n + lambda * params.weights[j];
  }
  return g;
}

// Step size 1/(lambda*(t + t0)) with t0 = 1/lambda, so the first steps are
// close to 1 instead of the 1/lambda of plain Pegasos.
TrainedModel train_svm(const Dataset& train, const SvmOptions& opt, TrainingTrace* trace) {
  require_nonempty(train, "train_svm");
  if (!(opt.lambda > 0.0)) throw ParameterError("svm lambda must be positive");
  if (opt.epochs < 1) throw ParameterError("svm epochs must be at least 1");

  LinearParams p{0.0, std::vector<double>(train.width(), 0.0)};
  if (trace) trace->losses.push_back(hinge_objective(p, train, opt.lambda));

  Rng rng(opt.seed);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  const double t0 = 1.0 / opt.lambda;
  double t = 0.0;
  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    for (auto i : order) {
      t += 1.0;
      const double eta = 1.0 / (opt.lambda * (t + t0));
      auto x = train.features.row(i);
      const double y = train.labels[i] ? 1.0 : -1.0;
      const bool violates = y * linear_response(p, x) < 1.0;
      const double shrink = 1.0 - eta * opt.lambda;
      for (std::size_t j = 0; j < x.size(); ++j) {
        p.weights[j] = shrink * p.weights[j] + (violates ? eta * y * x[j] : 0.0);
      }
      if (violates) p.bias += eta * y;
    }
    if (trace) trace->losses.push_back(hinge_objective(p, train, opt.lambda));
  }
  return TrainedModel(detail::spec_for(opt), train.width(), std::move(p));
}

}  // namespace survml
