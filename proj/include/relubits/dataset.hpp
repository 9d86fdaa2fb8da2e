#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "relubits/matrix.hpp"

namespace relubits {

/// Labeled samples: one row of `features` per entry of `labels`.
struct Dataset {
  Matrix features;
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return features.cols(); }

  /// Number of classes assuming labels are 0..max.
  std::size_t num_classes() const;

  Dataset subset(std::span<const std::size_t> rows) const;
};

struct BlobsConfig {
  std::size_t classes = 2;
  std::size_t dim = 16;
  std::size_t samples_per_class = 250;
  double separation = 4.0;  // distance between class means, in units of sigma
  double sigma = 1.0;
  std::uint64_t seed = 0;
};

/// Isotropic Gaussian blobs. Class means are separation*sigma/sqrt(2) times
/// orthonormal directions drawn from the seed, so every pair of means is
/// exactly `separation` sigmas apart. Rows are emitted in a seeded shuffle.
Dataset make_blobs(const BlobsConfig& cfg);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Seeded shuffle of 0..n-1 cut into the first round(n*train_fraction)
/// indices and the rest. Each part is returned in ascending order.
Split train_test_split(std::size_t n, double train_fraction, std::uint64_t seed);

/// Smallest and largest feature value over the whole matrix.
std::pair<double, double> feature_range(const Dataset& data);

}  // namespace relubits
