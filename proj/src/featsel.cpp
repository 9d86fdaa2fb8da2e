#include "relubits/featsel.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>

#include "relubits/error.hpp"

namespace relubits::featsel {

std::vector<double> chi2_scores(const bitvec::BitMatrix& bits, std::span<const int> labels) {
  require(labels.size() == bits.rows(), Status::shape, "chi2_scores: one label per row required");

  std::map<int, std::size_t> class_index;
  for (int y : labels) class_index.emplace(y, 0);
  require(class_index.size() >= 2, Status::label, "chi2_scores needs at least two classes");
  std::size_t next = 0;
  for (auto& [label, idx] : class_index) idx = next++;
  const std::size_t n_classes = class_index.size();

  // observed[c * n_bits + f]: rows of class c with bit f set.
  const std::size_t n_bits = bits.bits();
  std::vector<std::size_t> observed(n_classes * n_bits, 0);
  std::vector<std::size_t> class_rows(n_classes, 0);
  for (std::size_t r = 0; r < bits.rows(); ++r) {
    const std::size_t c = class_index.at(labels[r]);
    ++class_rows[c];
    std::size_t* counts = observed.data() + c * n_bits;
    const auto words = bits.row(r).words;
    for (std::size_t w = 0; w < words.size(); ++w) {
      std::uint64_t word = words[w];
      while (word != 0) {
        ++counts[w * bitvec::kWordBits + static_cast<std::size_t>(std::countr_zero(word))];
        word &= word - 1;
      }
    }
  }

  const auto n = static_cast<double>(bits.rows());
  std::vector<double> scores(n_bits, 0.0);
  for (std::size_t f = 0; f < n_bits; ++f) {
    std::size_t total = 0;
    for (std::size_t c = 0; c < n_classes; ++c) total += observed[c * n_bits + f];
    if (total == 0) continue;
    double score = 0.0;
    for (std::size_t c = 0; c < n_classes; ++c) {
      const double expected =
          static_cast<double>(total) * static_cast<double>(class_rows[c]) / n;
      const double diff = static_cast<double>(observed[c * n_bits + f]) - expected;
      score += diff * diff / expected;
    }
    scores[f] = score;
  }
  return scores;
}

std::vector<std::size_t> rank_features(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

FeatureScores select_k_best(const bitvec::BitMatrix& bits, std::span<const int> labels,
                            std::size_t k) {
  require(k >= 1 && k <= bits.bits(), Status::parameter,
          "k = " + std::to_string(k) + " must lie in [1, " + std::to_string(bits.bits()) + "]");
  FeatureScores out;
  out.scores = chi2_scores(bits, labels);
  out.selected = rank_features(out.scores);
  out.selected.resize(k);
  return out;
}

}  // namespace relubits::featsel
