#include "relubits/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "relubits/error.hpp"
#include "relubits/rng.hpp"

namespace relubits::svm {

namespace {

// Decision value with the bias as the trailing weight of an augmented x.
double augmented_dot(std::span<const double> w_aug, std::span<const double> x) {
  return dot(w_aug.first(x.size()), x) + w_aug.back();
}

}  // namespace

SvmModel svm_train(const Matrix& x, std::span<const int> y, const SvmConfig& cfg,
                   TrainTrace* trace) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  require(y.size() == n, Status::shape, "svm_train: one label per row required");
  require(std::isfinite(cfg.C) && cfg.C > 0.0, Status::parameter, "C must be positive");
  require(cfg.tol > 0.0, Status::parameter, "tol must be positive");
  bool has_pos = false;
  bool has_neg = false;
  for (int label : y) {
    require(label == 1 || label == -1, Status::label, "SVM labels must be -1 or +1");
    (label > 0 ? has_pos : has_neg) = true;
  }
  require(n >= 2 && has_pos && has_neg, Status::label, "svm_train needs both labels present");
  for (double v : x.data()) require(std::isfinite(v), Status::data, "non-finite feature value");

  std::vector<double> w(d + 1, 0.0);  // last entry is the bias
  std::vector<double> alpha(n, 0.0);
  std::vector<double> qdiag(n);
  for (std::size_t i = 0; i < n; ++i) qdiag[i] = dot(x.row(i), x.row(i)) + 1.0;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(cfg.seed);

  SvmModel model;
  model.C = cfg.C;
  model.seed = cfg.seed;
  if (trace != nullptr) *trace = {};

  for (std::size_t epoch = 1; epoch <= cfg.max_iter; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double violation = 0.0;
    for (std::size_t i : order) {
      const auto xi = x.row(i);
      const double yi = static_cast<double>(y[i]);
      const double g = yi * augmented_dot(w, xi) - 1.0;
      double pg = g;
      if (alpha[i] == 0.0) {
        pg = std::min(g, 0.0);
      } else if (alpha[i] == cfg.C) {
        pg = std::max(g, 0.0);
      }
      violation = std::max(violation, std::abs(pg));
      if (pg == 0.0) continue;
      const double old = alpha[i];
      alpha[i] = std::clamp(old - g / qdiag[i], 0.0, cfg.C);
      const double step = (alpha[i] - old) * yi;
      for (std::size_t j = 0; j < d; ++j) w[j] += step * xi[j];
      w[d] += step;
    }
    model.iterations = epoch;
    model.final_violation = violation;
    if (trace != nullptr) {
      SvmModel snapshot{std::vector<double>(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(d)),
                        w[d], cfg.C};
      trace->primal_objective.push_back(primal_objective(snapshot, x, y));
      trace->dual_objective.push_back(std::accumulate(alpha.begin(), alpha.end(), 0.0) -
                                      0.5 * dot(w, w));
    }
    if (violation < cfg.tol) break;
  }

  model.w.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(d));
  model.b = w[d];
  return model;
}

std::vector<double> svm_scores(const SvmModel& model, const Matrix& x) {
  require(x.cols() == model.w.size(), Status::shape,
          "svm_scores: model has " + std::to_string(model.w.size()) + " features, data has " +
              std::to_string(x.cols()));
  std::vector<double> s(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) s[i] = dot(model.w, x.row(i)) + model.b;
  return s;
}

int label_for_score(double score) { return score >= 0.0 ? 1 : -1; }

std::vector<int> svm_predict(const SvmModel& model, const Matrix& x) {
  const auto s = svm_scores(model, x);
  std::vector<int> out(s.size());
  std::ranges::transform(s, out.begin(), label_for_score);
  return out;
}

double primal_objective(const SvmModel& model, const Matrix& x, std::span<const int> y) {
  const auto s = svm_scores(model, x);
  double hinge = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    hinge += std::max(0.0, 1.0 - static_cast<double>(y[i]) * s[i]);
  return 0.5 * (dot(model.w, model.w) + model.b * model.b) + model.C * hinge;
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  require(predicted.size() == truth.size(), Status::shape, "accuracy: lengths differ");
  require(!truth.empty(), Status::shape, "accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double auroc(std::span<const double> scores, std::span<const int> truth) {
  require(scores.size() == truth.size(), Status::shape, "auroc: lengths differ");
  std::size_t n_pos = 0;
  for (int t : truth) n_pos += t > 0 ? 1 : 0;
  const std::size_t n_neg = truth.size() - n_pos;
  require(n_pos > 0 && n_neg > 0, Status::metric, "auroc needs both classes present");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::ranges::sort(order, [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of midranks (1-based) of the positives.
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j + 1);
    for (std::size_t t = i; t <= j; ++t)
      if (truth[order[t]] > 0) rank_sum += midrank;
    i = j + 1;
  }
  const double p = static_cast<double>(n_pos);
  const double u = rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(n_neg));
}

}  // namespace relubits::svm
