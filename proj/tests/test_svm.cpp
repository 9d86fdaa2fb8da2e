#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "relubits/svm.hpp"

using namespace relubits;
using namespace relubits::svm;
using support::status_of;

namespace {

// 2-D points on either side of x0 + x1 = 0 with margin >= 0.5.
std::pair<Matrix, std::vector<int>> separable(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  Matrix x(n, 2);
  std::vector<int> y(n);
  std::size_t i = 0;
  while (i < n) {
    const double a = u(g), b = u(g);
    const double d = (a + b) / std::sqrt(2.0);
    if (std::abs(d) < 0.5) continue;
    x(i, 0) = a;
    x(i, 1) = b;
    y[i] = d > 0 ? 1 : -1;
    ++i;
  }
  return {x, y};
}

}  // namespace

TEST_CASE("two points, large C") {
  const Matrix x(2, 1, {-1.0, 1.0});
  const std::vector<int> y{-1, 1};
  SvmConfig cfg;
  cfg.C = 1e6;
  cfg.tol = 1e-9;
  cfg.max_iter = 100000;
  const auto m = svm_train(x, y, cfg);
  CHECK(m.w[0] > 0.0);
  const auto s = svm_scores(m, x);
  CHECK(-s[0] >= 1.0 - 1e-6);
  CHECK(s[1] >= 1.0 - 1e-6);
}

TEST_CASE("separable blobs train to full accuracy") {
  const auto [x, y] = separable(19, 100);
  SvmConfig cfg;
  cfg.C = 100.0;
  cfg.max_iter = 5000;
  const auto m = svm_train(x, y, cfg);
  CHECK(accuracy(svm_predict(m, x), y) == 1.0);
}

TEST_CASE("flipping labels negates the model") {
  const auto [x, y] = separable(5, 60);
  std::vector<int> flipped(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) flipped[i] = -y[i];
  SvmConfig cfg;
  cfg.tol = 1e-8;
  cfg.max_iter = 20000;
  const auto a = svm_train(x, y, cfg);
  const auto b = svm_train(x, flipped, cfg);
  for (std::size_t j = 0; j < a.w.size(); ++j) CHECK(b.w[j] == doctest::Approx(-a.w[j]).epsilon(1e-5));
  CHECK(b.b == doctest::Approx(-a.b).epsilon(1e-5));
}

TEST_CASE("dual coordinate descent properties") {
  std::mt19937_64 g(71);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 30 + g() % 50, d = 1 + g() % 8;
    Matrix x(n, d);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = i % 2 == 0 ? 1 : -1;
      for (std::size_t j = 0; j < d; ++j) x(i, j) = nd(g) + (j == 0 ? 0.7 * y[i] : 0.0);
    }
    SvmConfig cfg;
    cfg.seed = t;
    TrainTrace trace;
    const auto m = svm_train(x, y, cfg, &trace);
    CHECK(m.final_violation < cfg.tol);
    REQUIRE(!trace.dual_objective.empty());
    for (std::size_t e = 1; e < trace.dual_objective.size(); ++e)
      CHECK(trace.dual_objective[e] >= trace.dual_objective[e - 1] - 1e-12);
    CHECK(primal_objective(m, x, y) == doctest::Approx(trace.primal_objective.back()));
    // Weak duality.
    CHECK(trace.primal_objective.back() >= trace.dual_objective.back() - 1e-9);

    // Constant-zero columns do not change predictions.
    Matrix padded(n, d + 3);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) padded(i, j) = x(i, j);
    const auto mp = svm_train(padded, y, cfg);
    CHECK(svm_predict(mp, padded) == svm_predict(m, x));
  }
}

// Dual coordinate descent ascends the dual only; the primal objective at epoch
// boundaries is not monotone in general. Kept as a known failure.
TEST_CASE("primal objective is non-increasing across epochs" * doctest::should_fail()) {
  std::mt19937_64 g(71);
  std::normal_distribution<double> nd;
  bool monotone = true;
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 30 + g() % 50, d = 1 + g() % 8;
    Matrix x(n, d);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = i % 2 == 0 ? 1 : -1;
      for (std::size_t j = 0; j < d; ++j) x(i, j) = nd(g) + (j == 0 ? 0.7 * y[i] : 0.0);
    }
    SvmConfig cfg;
    cfg.seed = t;
    TrainTrace trace;
    svm_train(x, y, cfg, &trace);
    for (std::size_t e = 1; e < trace.primal_objective.size(); ++e)
      monotone = monotone && trace.primal_objective[e] <= trace.primal_objective[e - 1] + 1e-9;
  }
  CHECK(monotone);
}

TEST_CASE("svm_train errors") {
  CHECK(status_of([] { svm_train(Matrix(2, 1, {0, 1}), std::vector<int>{1, 1}); }) == Status::label);
  CHECK(status_of([] { svm_train(Matrix(2, 1, {0, 1}), std::vector<int>{0, 1}); }) == Status::label);
  CHECK(status_of([] { svm_train(Matrix(2, 1, {0, INFINITY}), std::vector<int>{-1, 1}); }) ==
        Status::data);
}

TEST_CASE("svm_scores") {
  SvmModel m;
  m.w = {1.0, 0.0};
  const Matrix x(2, 2, {3, 5, 0, 7});
  const auto s = svm_scores(m, x);
  CHECK(s == std::vector<double>{3.0, 0.0});
  CHECK(svm_predict(m, x) == std::vector<int>{1, 1});
  CHECK(label_for_score(0.0) == 1);
  CHECK(label_for_score(-1e-300) == -1);
  CHECK(status_of([&] { svm_scores(m, Matrix(1, 3, 0.0)); }) == Status::shape);

  std::mt19937_64 g(12);
  std::normal_distribution<double> nd;
  SvmModel r;
  r.w.resize(9);
  for (auto& w : r.w) w = nd(g);
  r.b = nd(g);
  Matrix xr(20, 9);
  for (auto& v : xr.data()) v = nd(g);
  const auto sr = svm_scores(r, xr);
  for (std::size_t i = 0; i < 20; ++i) {
    double acc = r.b;
    for (std::size_t j = 0; j < 9; ++j) acc += r.w[j] * xr(i, j);
    CHECK(std::abs(sr[i] - acc) <= 1e-12 * std::max(1.0, std::abs(acc)));
  }
}

TEST_CASE("accuracy") {
  const std::vector<int> t{1, -1, 1, 1, -1, -1, 1, -1};
  CHECK(accuracy(t, t) == 1.0);
  std::vector<int> wrong(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) wrong[i] = -t[i];
  CHECK(accuracy(wrong, t) == 0.0);
  auto seven = t;
  seven[3] = -1;
  CHECK(accuracy(seven, t) == 0.875);
  CHECK(status_of([&] { accuracy(std::vector<int>{1}, t); }) == Status::shape);
}

TEST_CASE("auroc") {
  CHECK(auroc(std::vector<double>{0.9, 0.8, 0.2, 0.1}, std::vector<int>{1, 1, -1, -1}) == 1.0);
  CHECK(auroc(std::vector<double>{0.9, 0.3, 0.5, 0.1}, std::vector<int>{1, 1, -1, -1}) == 0.75);
  CHECK(auroc(std::vector<double>(6, 0.4), std::vector<int>{1, -1, 1, -1, 1, -1}) == 0.5);
  CHECK(status_of([] { auroc(std::vector<double>{1, 2}, std::vector<int>{1, 1}); }) ==
        Status::metric);
}

TEST_CASE("auroc matches pair counting and is rank invariant") {
  std::mt19937_64 g(2024);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + g() % 80;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(g() % 12) / 4.0;  // plenty of ties
      y[i] = g() % 2 ? 1 : -1;
    }
    y[0] = 1;
    y[1] = -1;
    const double a = auroc(s, y);
    CHECK(a == oracle::auroc(s, y));
    std::vector<double> warped(n);
    for (std::size_t i = 0; i < n; ++i) warped[i] = std::exp(3.0 * s[i]) - 7.0;
    CHECK(auroc(warped, y) == a);
  }
}
