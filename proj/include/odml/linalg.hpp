#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>

namespace odml {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Dense real symmetric matrix. The constructor replaces the input by
/// (m + m^T) / 2, so entries (i, j) and (j, i) are bit-identical afterwards.
class SymMatrix {
 public:
  explicit SymMatrix(const Matrix& m);

  static SymMatrix identity(Index dim);
  static SymMatrix zero(Index dim);
  static SymMatrix diagonal(const Vector& diag);

  Index dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }
  double trace() const { return m_.trace(); }

 private:
  Matrix m_;
};

/// Eigenvalues sorted descending; column i of `vectors` pairs with values[i].
struct EigenDecomposition {
  Vector values;
  Matrix vectors;

  Matrix reconstruct() const;
};

struct JacobiOptions {
  int max_sweeps = 100;
  /// Converged once the off-diagonal Frobenius norm is at most
  /// relative_tolerance * ||m||_F.
  double relative_tolerance = 1e-12;
};

/// Cyclic Jacobi eigensolver. Throws InvalidInput on non-finite entries and
/// NumericalFailure when the sweep budget runs out.
EigenDecomposition sym_eig(const SymMatrix& m, const JacobiOptions& options = {});

using ScalarFunction = std::function<double(double)>;

/// U f(Lambda) U^T. Throws DomainError when f yields a non-finite value.
SymMatrix spectral_apply(const SymMatrix& m, const ScalarFunction& f);
SymMatrix spectral_apply(const EigenDecomposition& eig, const ScalarFunction& f);

/// Real-branch Wright omega: the y > 0 with y + log(y) = z.
/// Arguments below about -745 underflow to 0.
double wright_omega(double z);

inline constexpr double kDefaultRankTol = 1e-8;

/// Rows are sqrt(lambda_i) u_i^T for every eigenvalue above
/// rank_tol * max(lambda_1, 1). Throws NotPSD when an eigenvalue falls below
/// minus that threshold.
Matrix psd_factorize(const SymMatrix& m, double rank_tol = kDefaultRankTol);
Matrix psd_factorize(const EigenDecomposition& eig, double rank_tol = kDefaultRankTol);

/// Number of eigenvalues strictly above rank_tol * max(lambda_1, 1).
Index count_above(const Vector& descending_values, double rank_tol);

/// lambda_max / lambda_min; throws Singular when lambda_min <= 0.
double condition_number(const SymMatrix& m);

/// Shortest decimal text that parses back to exactly v.
std::string format_real(double v);

}  // namespace odml
