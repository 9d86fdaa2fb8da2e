#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "relubits/matrix.hpp"

namespace relubits::svm {

struct SvmConfig {
  double C = 1.0;
  double tol = 1e-4;
  std::size_t max_iter = 1000;  // epochs
  std::uint64_t seed = 0;
};

struct SvmModel {
  std::vector<double> w;
  double b = 0.0;
  double C = 1.0;
  std::size_t iterations = 0;
  double final_violation = 0.0;  // max projected-gradient violation in the last epoch
  std::uint64_t seed = 0;
};

/// Per-epoch diagnostics, recorded only when asked for.
struct TrainTrace {
  std::vector<double> primal_objective;  // after each epoch
  std::vector<double> dual_objective;
};

/// Soft-margin linear SVM,
///   min 1/2 (|w|^2 + b^2) + C sum_i max(0, 1 - y_i (w.x_i + b)),
/// by dual coordinate descent with the bias folded in as a constant
/// feature of value 1. Labels are -1 / +1.
SvmModel svm_train(const Matrix& x, std::span<const int> y, const SvmConfig& cfg = {},
                   TrainTrace* trace = nullptr);

std::vector<double> svm_scores(const SvmModel& model, const Matrix& x);

/// sign(score) with zero mapped to +1.
std::vector<int> svm_predict(const SvmModel& model, const Matrix& x);

int label_for_score(double score);

double primal_objective(const SvmModel& model, const Matrix& x, std::span<const int> y);

double accuracy(std::span<const int> predicted, std::span<const int> truth);

/// Mann-Whitney AUROC with midranks; labels are -1 / +1 (positive = +1).
double auroc(std::span<const double> scores, std::span<const int> truth);

}  // namespace relubits::svm
