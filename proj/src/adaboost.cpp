// Discrete AdaBoost over exhaustive decision stumps.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "internal.hpp"

namespace survml {
namespace {

constexpr double kErrorTieTolerance = 1e-12;
constexpr double kMinError = 1e-10;

struct StumpCandidate {
  double error;
  std::size_t feature;
  double threshold;
  int polarity;
};

bool better(const StumpCandidate& a, const std::optional<StumpCandidate>& b) {
  if (!b) return true;
  if (a.error < b->error - kErrorTieTolerance) return true;
  if (a.error > b->error + kErrorTieTolerance) return false;
  if (a.feature != b->feature) return a.feature < b->feature;
  if (a.threshold != b->threshold) return a.threshold < b->threshold;
  return a.polarity > b->polarity;
}

}  // namespace

StumpFit fit_stump(const Matrix& x, std::span<const int> signs, std::span<const double> weights) {
  if (x.rows() == 0 || x.cols() == 0) throw ShapeError("fit_stump: empty input");
  if (signs.size() != x.rows() || weights.size() != x.rows()) {
    throw ShapeError("fit_stump: signs/weights length mismatch");
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double negatives = 0.0;
  for (std::size_t i = 0; i < signs.size(); ++i) {
    if (signs[i] < 0) negatives += weights[i];
  }

  std::optional<StumpCandidate> best;
  auto consider = [&](double err_plus, std::size_t f, double thr) {
    StumpCandidate plus{err_plus, f, thr, 1};
    StumpCandidate minus{total - err_plus, f, thr, -1};
    if (better(plus, best)) best = plus;
    if (better(minus, best)) best = minus;
  };

  std::vector<std::size_t> order(x.rows());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return x(a, f) < x(b, f); });

    // Threshold below the minimum: every sample votes `polarity`.
    double err_plus = negatives;
    consider(err_plus, f, -std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      const std::size_t i = order[k];
      err_plus += signs[i] > 0 ? weights[i] : -weights[i];
      const double a = x(i, f);
      const double b = x(order[k + 1], f);
      if (a == b) continue;
      double mid = a + (b - a) / 2.0;
      if (!(mid < b)) mid = a;
      consider(err_plus, f, mid);
    }
  }
  return StumpFit{Stump{best->feature, best->threshold, best->polarity},
                  std::max(0.0, best->error)};
}

TrainedModel train_adaboost(const Dataset& train, const AdaBoostOptions& opt, BoostTrace* trace) {
  if (opt.n_rounds < 1) throw ParameterError("adaboost n_rounds must be at least 1");
  const std::size_t n = train.size();
  const std::size_t positives = train.count_label(1);
  if (positives == 0 || positives == n) {
    throw EvaluationError("adaboost needs both classes in the training set");
  }

  std::vector<int> signs(n);
  for (std::size_t i = 0; i < n; ++i) signs[i] = train.labels[i] ? 1 : -1;
  std::vector<double> w(n, 1.0 / static_cast<double>(n));

  BoostParams model;
  for (int t = 0; t < opt.n_rounds; ++t) {
    const StumpFit fit = fit_stump(train.features, signs, w);
    BoostRound round{fit.stump, fit.error, 0.0, w, {}, true};
    if (fit.error >= 0.5) {
      round.kept = false;
      if (trace) trace->rounds.push_back(std::move(round));
      break;
    }
    const double err = std::max(fit.error, kMinError);
    const double alpha = 0.5 * std::log((1.0 - err) / err);

    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const int h = fit.stump.vote(train.features.row(i));
      w[i] *= std::exp(h == signs[i] ? -alpha : alpha);
      sum += w[i];
    }
    for (auto& wi : w) wi /= sum;

    model.stumps.push_back(fit.stump);
    model.alphas.push_back(alpha);
    round.alpha = alpha;
    round.weights_after = w;
    if (trace) trace->rounds.push_back(std::move(round));
    if (fit.error < kMinError) break;
  }
  return TrainedModel(detail::spec_for(opt), train.width(), std::move(model));
}

}  // namespace survml
