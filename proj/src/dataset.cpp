#include "relubits/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "relubits/error.hpp"
#include "relubits/rng.hpp"

namespace relubits {

std::size_t Dataset::num_classes() const {
  if (labels.empty()) return 0;
  return static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end())) + 1;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.features = Matrix(rows.size(), dim());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i] < size(), Status::index, "dataset row out of range");
    std::ranges::copy(features.row(rows[i]), out.features.row(i).begin());
    out.labels.push_back(labels[rows[i]]);
  }
  return out;
}

Dataset make_blobs(const BlobsConfig& cfg) {
  require(cfg.classes >= 2, Status::parameter, "blobs need at least two classes");
  require(cfg.dim >= cfg.classes, Status::parameter,
          "blobs need dim >= classes for orthonormal class directions");
  require(cfg.samples_per_class >= 1, Status::parameter, "blobs need samples");
  require(cfg.sigma > 0.0 && cfg.separation >= 0.0, Status::parameter, "invalid blob scale");

  Rng rng(cfg.seed);

  // Gram-Schmidt on Gaussian draws gives orthonormal class directions.
  std::vector<std::vector<double>> dirs;
  while (dirs.size() < cfg.classes) {
    std::vector<double> v(cfg.dim);
    for (double& x : v) x = rng.normal();
    for (const auto& d : dirs) {
      const double p = dot(v, d);
      for (std::size_t i = 0; i < cfg.dim; ++i) v[i] -= p * d[i];
    }
    const double n = norm2(v);
    if (n < 1e-6) continue;
    for (double& x : v) x /= n;
    dirs.push_back(std::move(v));
  }
  const double radius = cfg.separation * cfg.sigma / std::sqrt(2.0);

  const std::size_t total = cfg.classes * cfg.samples_per_class;
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span<std::size_t>(order));

  Dataset out;
  out.features = Matrix(total, cfg.dim);
  out.labels.resize(total);
  for (std::size_t slot = 0; slot < total; ++slot) {
    const std::size_t c = order[slot] / cfg.samples_per_class;
    out.labels[slot] = static_cast<int>(c);
    auto row = out.features.row(slot);
    for (std::size_t i = 0; i < cfg.dim; ++i)
      row[i] = radius * dirs[c][i] + cfg.sigma * rng.normal();
  }
  return out;
}

Split train_test_split(std::size_t n, double train_fraction, std::uint64_t seed) {
  require(train_fraction > 0.0 && train_fraction < 1.0, Status::parameter,
          "train fraction must lie in (0,1)");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * train_fraction));
  Split s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::ranges::sort(s.train);
  std::ranges::sort(s.test);
  return s;
}

std::pair<double, double> feature_range(const Dataset& data) {
  require(!data.features.empty(), Status::data, "empty dataset has no range");
  auto [lo, hi] = std::ranges::minmax_element(data.features.data());
  return {*lo, *hi};
}

}  // namespace relubits
