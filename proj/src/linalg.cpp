#include "odml/linalg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "odml/error.hpp"

namespace odml {

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::InvalidInput, "symmetric matrix must be square");
  }
  if (m.rows() < 1) {
    throw Error(ErrorKind::InvalidInput, "symmetric matrix must have dim >= 1");
  }
  m_ = (m + m.transpose()) * 0.5;
}

SymMatrix SymMatrix::identity(Index dim) { return SymMatrix(Matrix::Identity(dim, dim)); }

SymMatrix SymMatrix::zero(Index dim) { return SymMatrix(Matrix::Zero(dim, dim)); }

SymMatrix SymMatrix::diagonal(const Vector& diag) {
  return SymMatrix(Matrix(diag.asDiagonal()));
}

Matrix EigenDecomposition::reconstruct() const {
  return vectors * values.asDiagonal() * vectors.transpose();
}

namespace {

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  const Index n = a.rows();
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i != j) sum += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(sum);
}

// One Jacobi rotation A <- J^T A J zeroing A(p, q); V accumulates J.
void rotate(Matrix& a, Matrix& v, Index p, Index q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const Index n = a.rows();
  for (Index k = 0; k < n; ++k) {
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (Index k = 0; k < n; ++k) {
    const double apk = a(p, k);
    const double aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (Index k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace

EigenDecomposition sym_eig(const SymMatrix& m, const JacobiOptions& options) {
  const Matrix& src = m.matrix();
  if (!src.allFinite()) {
    throw Error(ErrorKind::InvalidInput, "sym_eig: non-finite matrix entry");
  }
  const Index n = m.dim();
  Matrix a = src;
  Matrix v = Matrix::Identity(n, n);
  const double threshold = options.relative_tolerance * src.norm();

  bool converged = false;
  for (int sweep = 0; sweep <= options.max_sweeps; ++sweep) {
    if (off_diagonal_norm(a) <= threshold) {
      converged = true;
      break;
    }
    if (sweep == options.max_sweeps) break;
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) rotate(a, v, p, q);
    }
  }
  if (!converged) {
    throw Error(ErrorKind::NumericalFailure, "sym_eig: Jacobi sweeps did not converge");
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&a](Index i, Index j) { return a(i, i) > a(j, j); });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    const Index src_col = order[static_cast<std::size_t>(k)];
    out.values(k) = a(src_col, src_col);
    out.vectors.col(k) = v.col(src_col);
  }
  return out;
}

SymMatrix spectral_apply(const EigenDecomposition& eig, const ScalarFunction& f) {
  Vector mapped(eig.values.size());
  for (Index i = 0; i < eig.values.size(); ++i) {
    mapped(i) = f(eig.values(i));
    if (!std::isfinite(mapped(i))) {
      throw Error(ErrorKind::DomainError,
                  "spectral_apply: function undefined at eigenvalue " +
                      std::to_string(eig.values(i)));
    }
  }
  return SymMatrix(eig.vectors * mapped.asDiagonal() * eig.vectors.transpose());
}

SymMatrix spectral_apply(const SymMatrix& m, const ScalarFunction& f) {
  return spectral_apply(sym_eig(m), f);
}

double wright_omega(double z) {
  if (!std::isfinite(z)) {
    throw Error(ErrorKind::InvalidInput, "wright_omega: non-finite argument");
  }
  // omega = exp(z - omega) agrees with exp(z) to below machine precision here.
  if (z < -40.0) return std::exp(z);

  auto residual = [z](double y) { return y + std::log(y) - z; };

  // Bracket with residual(lo) <= 0 <= residual(hi).
  double lo;
  double hi;
  double y;
  if (z >= 1.0) {
    lo = z - std::log(z);
    hi = z;
    y = z;
  } else {
    lo = std::exp(z - 1.0);
    hi = 1.0;
    y = z < 0.0 ? std::exp(z) : 1.0;
  }

  for (int iter = 0; iter < 100; ++iter) {
    const double g = residual(y);
    if (g == 0.0) return y;
    if (g < 0.0) {
      lo = y;
    } else {
      hi = y;
    }
    double next = y - y * g / (y + 1.0);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - y) <= 4.0 * std::numeric_limits<double>::epsilon() * next) {
      return next;
    }
    y = next;
  }
  return y;
}

Index count_above(const Vector& descending_values, double rank_tol) {
  if (descending_values.size() == 0) return 0;
  const double threshold = rank_tol * std::max(descending_values(0), 1.0);
  Index count = 0;
  for (Index i = 0; i < descending_values.size(); ++i) {
    if (descending_values(i) > threshold) ++count;
  }
  return count;
}

Matrix psd_factorize(const EigenDecomposition& eig, double rank_tol) {
  const Index n = eig.values.size();
  const double threshold = rank_tol * std::max(eig.values(0), 1.0);
  if (eig.values(n - 1) < -threshold) {
    throw Error(ErrorKind::NotPSD, "psd_factorize: eigenvalue " +
                                       std::to_string(eig.values(n - 1)) +
                                       " below -rank_tol threshold");
  }
  const Index rank = count_above(eig.values, rank_tol);
  Matrix l(rank, n);
  for (Index r = 0; r < rank; ++r) {
    l.row(r) = std::sqrt(eig.values(r)) * eig.vectors.col(r).transpose();
  }
  return l;
}

Matrix psd_factorize(const SymMatrix& m, double rank_tol) {
  return psd_factorize(sym_eig(m), rank_tol);
}

double condition_number(const SymMatrix& m) {
  const EigenDecomposition eig = sym_eig(m);
  const double lmin = eig.values(eig.values.size() - 1);
  if (lmin <= 0.0) {
    throw Error(ErrorKind::Singular, "condition_number: matrix is not positive definite");
  }
  return eig.values(0) / lmin;
}

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace odml
