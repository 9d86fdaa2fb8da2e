#pragma once

#include <optional>

#include "relubits/matrix.hpp"

namespace relubits {

enum class Metric { normalized_hamming, cosine };

const char* metric_name(Metric m);

/// Symmetric n x n dissimilarity matrix with a zero diagonal.
/// normalized_hamming entries lie in [0,1], cosine entries in [0,2].
struct DissimMatrix {
  Matrix values;
  Metric metric = Metric::normalized_hamming;
  std::optional<int> layer_tag;

  std::size_t size() const { return values.rows(); }
};

}  // namespace relubits
