#pragma once

#include <optional>

#include "relubits/bitvec.hpp"
#include "relubits/dissim.hpp"
#include "relubits/matrix.hpp"

namespace relubits::rdm {

/// L = D - A with D = diag(A e). Keeps the adjacency it was built from.
struct LaplacianMatrix {
  Matrix values;
  Matrix adjacency;

  std::size_t size() const { return values.rows(); }
};

/// Normalized Hamming RDM of the rows of `bits` (needs at least two rows).
DissimMatrix rdm_hamming(const bitvec::BitMatrix& bits, std::optional<int> layer_tag = {});

/// Cosine distance 1 - cos(e_j, e_k) between the rows of `embeddings`.
/// A zero row is a Status::degenerate error.
DissimMatrix rdm_cosine(const Matrix& embeddings, std::optional<int> layer_tag = {});

/// Similarity graph A = 1 - R off the diagonal, A_jj = 0. Entries of R
/// outside [0,1] are a Status::range error.
Matrix adjacency_from_dissim(const DissimMatrix& rdm);

/// Throws Status::shape for a non-square A, Status::data for asymmetry
/// above 1e-9, negative weights or a nonzero diagonal.
LaplacianMatrix laplacian(const Matrix& adjacency);

/// Pearson correlation of the strict upper triangles, visited row-major.
double pearson_rdm(const DissimMatrix& a, const DissimMatrix& b);

}  // namespace relubits::rdm
