#pragma once

#include <string>
#include <string_view>

#include "odml/linalg.hpp"
#include "odml/metric.hpp"

namespace odml {

/// Bregman matrix divergence generator: squared Frobenius norm, von Neumann
/// entropy, or log-determinant.
enum class Family { SFN, VND, LDD };

/// Nonconvex forms act on a projection matrix A through AA^T; convex forms
/// act on the Mahalanobis matrix M.
enum class Form { NonconvexOnA, ConvexOnM };

std::string_view to_string(Family family);
Family parse_family(std::string_view name);

struct RegularizerSpec {
  Family family = Family::VND;
  Form form = Form::ConvexOnM;
  double gamma = 0.0;
  double epsilon = 1e-5;

  /// Throws InvalidInput on gamma < 0, or epsilon outside (0, 1) when the
  /// convex VND/LDD forms need it.
  void validate() const;
  /// "CSFN", "CVND", "CLDD", "SFN", "VND" or "LDD".
  std::string name() const;
  /// Inverse of name(); gamma and epsilon are left at their defaults.
  static RegularizerSpec parse(std::string_view name);
};

struct ScalarProxProblem {
  double lambda_tilde = 0.0;
  double eta = 1.0;
  double gamma = 0.0;
  double epsilon = 1e-5;

  void validate() const;
};

/// Gamma_phi(X, Y) = phi(X) - phi(Y) - tr(grad phi(Y)^T (X - Y)).
/// VND and LDD need SPD arguments (DomainError otherwise).
double bregman_divergence(Family family, const SymMatrix& x, const SymMatrix& y);

/// Omega_sfn(A) = ||AA^T - I||_F^2, Omega_vnd(A) = tr(AA^T log AA^T - AA^T) + R,
/// Omega_ldd(A) = tr(AA^T) - logdet(AA^T) - R. An A with zero rows scores 0.
/// VND/LDD throw Singular when AA^T is rank deficient.
double omega_nonconvex(Family family, const Matrix& a);

/// Gradient of omega_nonconvex with respect to A.
Matrix grad_nonconvex(Family family, const Matrix& a);

/// Convex regularizers in their full (unshifted) forms:
///   CSFN  ||M - I||_F^2 + tr(M)
///   CVND  Gamma_vnd(M + eps I, I) + tr(M)
///   CLDD  Gamma_ldd(M + eps I, I) - (1 + log eps) tr(M)
/// Throws NotPSD for matrices with a clearly negative eigenvalue.
double omega_convex(const RegularizerSpec& spec, const SymMatrix& m);
double omega_convex(const RegularizerSpec& spec, const MahalanobisMetric& m);
/// Same value from a spectrum; tiny negative eigenvalues are clamped to zero.
double omega_convex_spectrum(const RegularizerSpec& spec, const Vector& eigenvalues);

/// CSFN 2(M - I) + I, CVND log(M + eps I) + I, CLDD -(M + eps I)^{-1} + log(1/eps) I.
SymMatrix grad_convex(const RegularizerSpec& spec, const SymMatrix& m);

/// argmin_{x >= 0} (x - lambda_tilde)^2 / (2 eta) + gamma h(x) in closed form.
double prox_scalar(Family family, const ScalarProxProblem& p);

/// x^2 + linear x + constant = 0, the first-order condition of the LDD
/// scalar prox multiplied through by eta (x + eps).
struct LddQuadratic {
  double linear = 0.0;
  double constant = 0.0;
};

LddQuadratic ldd_prox_quadratic(const ScalarProxProblem& p);
/// Picks the best of {nonnegative real roots, 0}; falls back to bisection on
/// the derivative when the discriminant is numerically marginal.
double solve_ldd_prox(const ScalarProxProblem& p, const LddQuadratic& q);

/// Value of the scalar prox objective, with the regularizer term up to the
/// additive constant that the convex forms carry per eigenvalue.
double prox_scalar_objective(Family family, const ScalarProxProblem& p, double x);

/// Eigen-wise proximal step on M_tilde; the result is PSD.
MahalanobisMetric prox_matrix(const RegularizerSpec& spec, const SymMatrix& m_tilde, double eta);

}  // namespace odml
