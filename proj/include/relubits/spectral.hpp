#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "relubits/matrix.hpp"
#include "relubits/rdm.hpp"

namespace relubits::spectral {

/// Entries with magnitude at or below this count as zero for sign decisions.
inline constexpr double kSignTolerance = 1e-12;

/// Eigenvalues at or below this times max(1, largest |eigenvalue|) count as zero.
inline constexpr double kZeroEigenvalueTolerance = 1e-8;

inline constexpr std::size_t kMaxJacobiSweeps = 100;

struct EigenResult {
  std::vector<double> eigenvalues;  // ascending
  Matrix eigenvectors;              // column k pairs with eigenvalues[k]
  std::size_t sweeps = 0;
};

/// Full spectrum of a symmetric matrix by cyclic Jacobi rotations.
/// Throws Status::shape / Status::data for non-square or asymmetric input
/// and Status::convergence after kMaxJacobiSweeps sweeps.
EigenResult eig_symmetric(const Matrix& m);

/// Number of eigenvalues treated as zero.
std::size_t zero_eigenvalue_count(std::span<const double> ascending_eigenvalues);

/// Flips v so that its first entry with |v_i| > kSignTolerance is positive.
void canonicalize_sign(std::span<double> v);

struct FiedlerPair {
  double lambda2 = 0.0;
  std::vector<double> vector;  // unit norm, sign canonicalized
};

/// Second-smallest eigenpair of a connected graph's Laplacian. A
/// disconnected graph is a Status::multiplicity error.
FiedlerPair fiedler_vector(const rdm::LaplacianMatrix& laplacian);

struct Partition {
  std::vector<int> assignment;
  int n_clusters = 2;
  std::vector<double> fiedler_vector;     // the v2 used; empty when n = 1
  double lambda2 = 0.0;                   // algebraic connectivity
  std::vector<std::size_t> bucket_sizes;  // vertices per cluster id, zeros allowed
};

/// Two-way split on the sign of v2: negative entries form cluster 0,
/// positive and zero entries cluster 1.
Partition fiedler_partition(const rdm::LaplacianMatrix& laplacian);

/// 2^levels clusters from the sign patterns of the eigenvectors of the
/// `levels` smallest nonzero eigenvalues. Bit k of a vertex's cluster id is
/// set when entry i of the k-th of those vectors is positive or zero.
Partition sign_pattern_partition(const rdm::LaplacianMatrix& laplacian, std::size_t levels);

struct PartitionAccuracy {
  double overall = 0.0;
  std::vector<int> classes;          // distinct labels, ascending
  std::vector<double> per_class;     // accuracy per entry of `classes`
  std::vector<int> cluster_to_class; // the chosen bijection
};

/// Best accuracy over all bijections cluster -> class. Ties between
/// bijections resolve to the lexicographically first permutation.
PartitionAccuracy partition_accuracy(const Partition& partition, std::span<const int> labels);

}  // namespace relubits::spectral
