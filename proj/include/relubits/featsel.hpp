#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "relubits/bitvec.hpp"

namespace relubits::featsel {

struct FeatureScores {
  std::vector<double> scores;         // one chi-square statistic per feature
  std::vector<std::size_t> selected;  // score descending, index ascending on ties
};

/// Feature-sum chi-square of every bit column against the class labels:
///   observed_c = number of rows of class c with the bit set
///   expected_c = (sum_c observed_c) * n_c / n
///   score      = sum_c (observed_c - expected_c)^2 / expected_c
/// Classes are visited in ascending label order. A column that is never set
/// scores 0.
std::vector<double> chi2_scores(const bitvec::BitMatrix& bits, std::span<const int> labels);

/// Top-k features by chi2 score. Throws Status::parameter unless
/// 1 <= k <= n_bits.
FeatureScores select_k_best(const bitvec::BitMatrix& bits, std::span<const int> labels,
                            std::size_t k);

/// The ordering select_k_best uses, over all features.
std::vector<std::size_t> rank_features(std::span<const double> scores);

}  // namespace relubits::featsel
