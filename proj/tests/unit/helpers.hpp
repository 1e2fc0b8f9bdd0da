#pragma once

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "odml/linalg.hpp"

namespace odml::testing {

inline Matrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = n(rng);
  }
  return m;
}

inline Matrix random_symmetric(Index d, std::mt19937_64& rng) {
  const Matrix g = gaussian(d, d, rng);
  return (g + g.transpose()) / 2.0;
}

/// Full-rank SPD with eigenvalues roughly in [0.1, 3].
inline Matrix random_spd(Index d, std::mt19937_64& rng) {
  const Matrix g = gaussian(d, d, rng);
  return g * g.transpose() / static_cast<double>(d) + 0.1 * Matrix::Identity(d, d);
}

/// Eigen's self-adjoint solver, used as an independent reference.
inline Vector reference_eigenvalues_desc(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  return es.eigenvalues().reverse();
}

inline Matrix reference_apply(const Matrix& m, double (*f)(double)) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  Vector v = es.eigenvalues();
  for (Index i = 0; i < v.size(); ++i) v(i) = f(v(i));
  return es.eigenvectors() * v.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace odml::testing
