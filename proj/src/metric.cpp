#include "odml/metric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "odml/error.hpp"

namespace odml {

MahalanobisMetric::MahalanobisMetric(SymMatrix matrix, EigenDecomposition eigen)
    : matrix_(std::move(matrix)), eigen_(std::move(eigen)) {}

MahalanobisMetric MahalanobisMetric::identity(Index dim) {
  return from_eigen(Vector::Ones(dim), Matrix::Identity(dim, dim));
}

MahalanobisMetric MahalanobisMetric::from_eigen(const Vector& values, const Matrix& vectors) {
  const Index n = values.size();
  if (n < 1 || vectors.rows() != n || vectors.cols() != n) {
    throw Error(ErrorKind::InvalidInput, "from_eigen: shape mismatch");
  }
  if (!values.allFinite() || !vectors.allFinite()) {
    throw Error(ErrorKind::InvalidInput, "from_eigen: non-finite eigenpair");
  }
  const double tol = 1e-8 * std::max(1.0, values.maxCoeff());
  if (values.minCoeff() < -tol) {
    throw Error(ErrorKind::NotPSD, "from_eigen: negative eigenvalue " +
                                       std::to_string(values.minCoeff()));
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&values](Index i, Index j) { return values(i) > values(j); });
  EigenDecomposition eig;
  eig.values.resize(n);
  eig.vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    eig.values(k) = values(order[static_cast<std::size_t>(k)]);
    eig.vectors.col(k) = vectors.col(order[static_cast<std::size_t>(k)]);
  }
  SymMatrix m(eig.reconstruct());
  return MahalanobisMetric(std::move(m), std::move(eig));
}

MahalanobisMetric MahalanobisMetric::from_matrix(const SymMatrix& m) {
  const EigenDecomposition eig = sym_eig(m);
  const double tol = 1e-8 * std::max(1.0, eig.values(0));
  if (eig.values(eig.values.size() - 1) < -tol) {
    throw Error(ErrorKind::NotPSD, "from_matrix: matrix is not PSD");
  }
  return MahalanobisMetric(m, eig);
}

ProjectionMatrix::ProjectionMatrix(Matrix a) : a_(std::move(a)) {
  if (a_.cols() < 1) {
    throw Error(ErrorKind::InvalidInput, "projection matrix needs at least one column");
  }
  if (!a_.allFinite()) {
    throw Error(ErrorKind::InvalidInput, "projection matrix has non-finite entries");
  }
}

SymMatrix ProjectionMatrix::mahalanobis() const { return SymMatrix(a_.transpose() * a_); }

}  // namespace odml
