#include "odml/random_matrices.hpp"

#include "odml/error.hpp"

namespace odml {

Matrix random_gaussian(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  }
  return m;
}

SymMatrix random_psd(Index dim, Rng& rng) {
  std::uniform_int_distribution<Index> rank_dist(1, dim);
  const Index k = rank_dist(rng);
  const Matrix b = random_gaussian(dim, k, rng);
  return SymMatrix(b * b.transpose() / static_cast<double>(k));
}

Matrix random_orthonormal_rows(Index rows, Index dim, Rng& rng) {
  if (rows > dim) throw Error(ErrorKind::InvalidInput, "orthonormal rows need rows <= dim");
  const Eigen::HouseholderQR<Matrix> qr(random_gaussian(dim, rows, rng));
  const Matrix q = qr.householderQ() * Matrix::Identity(dim, rows);
  return q.transpose();
}

Matrix random_near_orthonormal(Index rows, Index dim, double sv_low, double sv_high, Rng& rng) {
  std::uniform_real_distribution<double> sv(sv_low, sv_high);
  Vector s(rows);
  for (Index i = 0; i < rows; ++i) s(i) = sv(rng);
  const Matrix u = random_orthonormal_rows(rows, rows, rng);
  const Matrix v = random_orthonormal_rows(rows, dim, rng);
  return u * s.asDiagonal() * v;
}

}  // namespace odml
