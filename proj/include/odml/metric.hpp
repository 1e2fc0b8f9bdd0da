#pragma once

#include <limits>
#include <string>

#include "odml/linalg.hpp"

namespace odml {

struct Provenance {
  std::string config_hash;
  int epochs_run = 0;
  double final_objective = std::numeric_limits<double>::quiet_NaN();
};

/// PSD Mahalanobis matrix M with its eigendecomposition cached. The matrix is
/// always assembled from the stored eigenpairs, so a metric rebuilt from the
/// same eigenpairs reproduces M bit for bit.
class MahalanobisMetric {
 public:
  static MahalanobisMetric identity(Index dim);
  /// Sorts the pairs descending (stable) and assembles U diag(values) U^T.
  static MahalanobisMetric from_eigen(const Vector& values, const Matrix& vectors);
  static MahalanobisMetric from_matrix(const SymMatrix& m);

  Index dim() const noexcept { return matrix_.dim(); }
  const SymMatrix& matrix() const noexcept { return matrix_; }
  const EigenDecomposition& eigen() const noexcept { return eigen_; }

  Provenance provenance;

 private:
  MahalanobisMetric(SymMatrix matrix, EigenDecomposition eigen);

  SymMatrix matrix_;
  EigenDecomposition eigen_;
};

/// R x D projection; rows are projection vectors.
class ProjectionMatrix {
 public:
  explicit ProjectionMatrix(Matrix a);

  Index rows() const noexcept { return a_.rows(); }
  Index dim() const noexcept { return a_.cols(); }
  const Matrix& matrix() const noexcept { return a_; }
  /// A^T A.
  SymMatrix mahalanobis() const;

  Provenance provenance;

 private:
  Matrix a_;
};

}  // namespace odml
