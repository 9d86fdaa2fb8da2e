#include "relubits/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "relubits/error.hpp"

namespace relubits::spectral {

namespace {

double max_off_diagonal(const Matrix& a) {
  double off = 0.0;
  for (std::size_t p = 0; p < a.rows(); ++p)
    for (std::size_t q = p + 1; q < a.cols(); ++q) off = std::max(off, std::abs(a(p, q)));
  return off;
}

// One Jacobi rotation in the (p,q) plane that annihilates a(p,q).
void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const std::size_t n = a.rows();

  const double app = a(p, p);
  const double aqq = a(q, q);
  for (std::size_t k = 0; k < n; ++k) {
    if (k == p || k == q) continue;
    const double akp = a(k, p);
    const double akq = a(k, q);
    const double np = c * akp - s * akq;
    const double nq = s * akp + c * akq;
    a(k, p) = np;
    a(p, k) = np;
    a(k, q) = nq;
    a(q, k) = nq;
  }
  a(p, p) = app - t * apq;
  a(q, q) = aqq + t * apq;
  a(p, q) = 0.0;
  a(q, p) = 0.0;

  for (std::size_t k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

void require_connected(std::span<const double> eigenvalues) {
  const std::size_t zeros = zero_eigenvalue_count(eigenvalues);
  require(zeros == 1, Status::multiplicity,
          "graph is not connected: eigenvalue 0 has multiplicity " + std::to_string(zeros) +
              " (" + std::to_string(zeros) + " connected components)");
}

Partition from_sign_patterns(const EigenResult& eig, std::size_t levels) {
  const std::size_t n = eig.eigenvalues.size();
  Partition p;
  p.n_clusters = 1 << levels;
  p.assignment.assign(n, 0);
  p.lambda2 = eig.eigenvalues[1];
  p.bucket_sizes.assign(static_cast<std::size_t>(p.n_clusters), 0);
  for (std::size_t k = 0; k < levels; ++k) {
    std::vector<double> vk = eig.eigenvectors.column(k + 1);
    canonicalize_sign(vk);
    for (std::size_t i = 0; i < n; ++i)
      if (!(vk[i] < -kSignTolerance)) p.assignment[i] |= 1 << k;
    if (k == 0) p.fiedler_vector = std::move(vk);
  }
  for (int id : p.assignment) ++p.bucket_sizes[static_cast<std::size_t>(id)];
  return p;
}

}  // namespace

EigenResult eig_symmetric(const Matrix& m) {
  const std::size_t n = m.rows();
  require(n >= 1 && m.cols() == n, Status::shape, "eig_symmetric needs a square, nonempty matrix");
  for (double x : m.data()) require(std::isfinite(x), Status::data, "matrix has non-finite entries");
  require(asymmetry(m) <= 1e-9, Status::data, "eig_symmetric: matrix is not symmetric");

  Matrix a = m;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(j, i) = a(i, j);
  Matrix v = Matrix::identity(n);
  const double tol = 1e-12 * frobenius_norm(m);

  EigenResult out;
  bool converged = false;
  for (std::size_t sweep = 0; sweep <= kMaxJacobiSweeps; ++sweep) {
    const double off = max_off_diagonal(a);
    if (off < tol || off == 0.0) {
      converged = true;
      out.sweeps = sweep;
      break;
    }
    if (sweep == kMaxJacobiSweeps) break;
    // Entries already under half the stopping threshold are left alone:
    // inside clusters of repeated eigenvalues they are roundoff, and
    // rotating them by large angles keeps re-spreading the remaining
    // off-diagonal mass instead of removing it.
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q)
        if (std::abs(a(p, q)) > 0.5 * tol) rotate(a, v, p, q);
  }
  require(converged, Status::convergence,
          "Jacobi eigensolver did not converge in " + std::to_string(kMaxJacobiSweeps) +
              " sweeps");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::ranges::stable_sort(order, [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
  }
  return out;
}

std::size_t zero_eigenvalue_count(std::span<const double> ascending_eigenvalues) {
  double scale = 1.0;
  for (double l : ascending_eigenvalues) scale = std::max(scale, std::abs(l));
  const double tol = kZeroEigenvalueTolerance * scale;
  return static_cast<std::size_t>(std::ranges::count_if(
      ascending_eigenvalues, [tol](double l) { return std::abs(l) <= tol; }));
}

void canonicalize_sign(std::span<double> v) {
  for (double x : v) {
    if (std::abs(x) > kSignTolerance) {
      if (x < 0.0)
        for (double& y : v) y = -y;
      return;
    }
  }
}

FiedlerPair fiedler_vector(const rdm::LaplacianMatrix& laplacian) {
  require(laplacian.size() >= 2, Status::parameter, "a Fiedler vector needs at least two vertices");
  const EigenResult eig = eig_symmetric(laplacian.values);
  require_connected(eig.eigenvalues);
  FiedlerPair f;
  f.lambda2 = eig.eigenvalues[1];
  f.vector = eig.eigenvectors.column(1);
  const double n = norm2(f.vector);
  for (double& x : f.vector) x /= n;
  canonicalize_sign(f.vector);
  return f;
}

Partition fiedler_partition(const rdm::LaplacianMatrix& laplacian) {
  if (laplacian.size() == 1) {
    Partition p;
    p.assignment = {1};
    p.bucket_sizes = {0, 1};
    return p;
  }
  return sign_pattern_partition(laplacian, 1);
}

Partition sign_pattern_partition(const rdm::LaplacianMatrix& laplacian, std::size_t levels) {
  const std::size_t n = laplacian.size();
  require(levels >= 1 && levels < 31, Status::parameter, "levels must lie in [1, 30]");
  require(n > (std::size_t{1} << levels), Status::parameter,
          "2^" + std::to_string(levels) + " clusters need more than " +
              std::to_string(std::size_t{1} << levels) + " vertices, got " + std::to_string(n));
  const EigenResult eig = eig_symmetric(laplacian.values);
  require_connected(eig.eigenvalues);
  return from_sign_patterns(eig, levels);
}

PartitionAccuracy partition_accuracy(const Partition& partition, std::span<const int> labels) {
  const std::size_t n = partition.assignment.size();
  require(labels.size() == n, Status::evaluation, "labels and partition differ in length");
  PartitionAccuracy acc;
  acc.classes.assign(labels.begin(), labels.end());
  std::ranges::sort(acc.classes);
  acc.classes.erase(std::unique(acc.classes.begin(), acc.classes.end()), acc.classes.end());
  const std::size_t k = acc.classes.size();
  require(k == static_cast<std::size_t>(partition.n_clusters), Status::evaluation,
          std::to_string(k) + " classes cannot be matched to " +
              std::to_string(partition.n_clusters) + " clusters");
  require(k <= 10, Status::evaluation, "bijection search is limited to 10 clusters");

  // counts[c][j]: vertices in cluster c whose class is classes[j].
  std::vector<std::vector<std::size_t>> counts(k, std::vector<std::size_t>(k, 0));
  std::vector<std::size_t> class_size(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = static_cast<std::size_t>(std::ranges::lower_bound(acc.classes, labels[i]) -
                                            acc.classes.begin());
    const int c = partition.assignment[i];
    require(c >= 0 && static_cast<std::size_t>(c) < k, Status::evaluation, "cluster id out of range");
    ++counts[static_cast<std::size_t>(c)][j];
    ++class_size[j];
  }

  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::size_t> best = perm;
  std::size_t best_correct = 0;
  bool first = true;
  do {
    std::size_t correct = 0;
    for (std::size_t c = 0; c < k; ++c) correct += counts[c][perm[c]];
    if (first || correct > best_correct) {
      best_correct = correct;
      best = perm;
      first = false;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  acc.overall = n == 0 ? 0.0 : static_cast<double>(best_correct) / static_cast<double>(n);
  acc.cluster_to_class.resize(k);
  acc.per_class.assign(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    acc.cluster_to_class[c] = acc.classes[best[c]];
    const std::size_t j = best[c];
    if (class_size[j] > 0)
      acc.per_class[j] = static_cast<double>(counts[c][j]) / static_cast<double>(class_size[j]);
  }
  return acc;
}

}  // namespace relubits::spectral
