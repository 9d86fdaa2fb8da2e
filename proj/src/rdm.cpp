#include "relubits/rdm.hpp"

#include <algorithm>
#include <cmath>

#include "relubits/error.hpp"

namespace relubits {

const char* metric_name(Metric m) {
  return m == Metric::normalized_hamming ? "normalized-hamming" : "cosine";
}

}  // namespace relubits

namespace relubits::rdm {

DissimMatrix rdm_hamming(const bitvec::BitMatrix& bits, std::optional<int> layer_tag) {
  DissimMatrix r = bitvec::hamming_matrix(bits);
  r.layer_tag = layer_tag;
  return r;
}

DissimMatrix rdm_cosine(const Matrix& embeddings, std::optional<int> layer_tag) {
  const std::size_t n = embeddings.rows();
  require(n >= 2, Status::shape, "rdm_cosine needs at least two rows");
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    norms[i] = norm2(embeddings.row(i));
    require(norms[i] > 0.0, Status::degenerate,
            "rdm_cosine: row " + std::to_string(i) + " has zero norm");
  }
  DissimMatrix r;
  r.metric = Metric::cosine;
  r.layer_tag = layer_tag;
  r.values = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double c = dot(embeddings.row(i), embeddings.row(j)) / (norms[i] * norms[j]);
      c = std::clamp(c, -1.0, 1.0);
      r.values(i, j) = 1.0 - c;
      r.values(j, i) = 1.0 - c;
    }
  }
  return r;
}

Matrix adjacency_from_dissim(const DissimMatrix& rdm) {
  const std::size_t n = rdm.size();
  require(rdm.values.cols() == n, Status::shape, "dissimilarity matrix is not square");
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = rdm.values(i, j);
      require(v >= 0.0 && v <= 1.0, Status::range,
              "adjacency_from_dissim: entry outside [0,1]");
      if (i != j) a(i, j) = 1.0 - v;
    }
  }
  return a;
}

LaplacianMatrix laplacian(const Matrix& adjacency) {
  const std::size_t n = adjacency.rows();
  require(adjacency.cols() == n, Status::shape, "adjacency is not square");
  require(asymmetry(adjacency) <= 1e-9, Status::data, "adjacency is not symmetric");
  LaplacianMatrix l;
  l.adjacency = adjacency;
  l.values = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    require(adjacency(i, i) == 0.0, Status::data, "adjacency has a self-loop");
    double degree = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double w = adjacency(i, j);
      require(w >= 0.0, Status::data, "adjacency has a negative weight");
      if (i == j) continue;
      degree += w;
      l.values(i, j) = -w;
    }
    l.values(i, i) = degree;
  }
  return l;
}

double pearson_rdm(const DissimMatrix& a, const DissimMatrix& b) {
  const std::size_t n = a.size();
  require(n == b.size() && a.values.cols() == n && b.values.cols() == n, Status::shape,
          "pearson_rdm: matrices differ in size");
  require(n >= 3, Status::shape, "pearson_rdm needs n >= 3");
  const std::size_t m = n * (n - 1) / 2;
  double mean_a = 0.0;
  double mean_b = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      mean_a += a.values(i, j);
      mean_b += b.values(i, j);
    }
  mean_a /= static_cast<double>(m);
  mean_b /= static_cast<double>(m);
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double da = a.values(i, j) - mean_a;
      const double db = b.values(i, j) - mean_b;
      sab += da * db;
      saa += da * da;
      sbb += db * db;
    }
  require(saa > 0.0 && sbb > 0.0, Status::degenerate,
          "pearson_rdm: an RDM has zero variance");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace relubits::rdm
