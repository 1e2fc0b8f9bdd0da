#include "odml/regularizers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "odml/error.hpp"

namespace odml {

namespace {

// Products eta * gamma below this are treated as a zero-weight prox.
constexpr double kTinyStep = 1e-15;

double psd_tolerance(const Vector& values) {
  return 1e-8 * std::max(1.0, values.maxCoeff());
}

void require_psd(const Vector& values, const char* where) {
  if (values.minCoeff() < -psd_tolerance(values)) {
    throw Error(ErrorKind::NotPSD, std::string(where) + ": matrix is not PSD (eigenvalue " +
                                       std::to_string(values.minCoeff()) + ")");
  }
}

void require_spd(const Vector& values, const char* where) {
  if (!(values.minCoeff() > 0.0)) {
    throw Error(ErrorKind::DomainError, std::string(where) + ": argument must be SPD");
  }
}

double clamp0(double v) { return v < 0.0 ? 0.0 : v; }

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::SFN: return "SFN";
    case Family::VND: return "VND";
    case Family::LDD: return "LDD";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  if (name == "SFN" || name == "sfn") return Family::SFN;
  if (name == "VND" || name == "vnd") return Family::VND;
  if (name == "LDD" || name == "ldd") return Family::LDD;
  throw Error(ErrorKind::InvalidInput, "unknown regularizer family '" + std::string(name) + "'");
}

void RegularizerSpec::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorKind::InvalidInput, "regularizer gamma must be finite and >= 0");
  }
  if (form == Form::ConvexOnM && family != Family::SFN &&
      !(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorKind::InvalidInput, "regularizer epsilon must lie in (0, 1)");
  }
}

std::string RegularizerSpec::name() const {
  std::string base(to_string(family));
  return form == Form::ConvexOnM ? "C" + base : base;
}

RegularizerSpec RegularizerSpec::parse(std::string_view name) {
  RegularizerSpec spec;
  if (name.size() == 4 && (name[0] == 'C' || name[0] == 'c')) {
    spec.form = Form::ConvexOnM;
    spec.family = parse_family(name.substr(1));
  } else {
    spec.form = Form::NonconvexOnA;
    spec.family = parse_family(name);
  }
  return spec;
}

void ScalarProxProblem::validate() const {
  if (!std::isfinite(lambda_tilde)) {
    throw Error(ErrorKind::InvalidInput, "prox: lambda_tilde must be finite");
  }
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw Error(ErrorKind::InvalidInput, "prox: eta must be > 0");
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorKind::InvalidInput, "prox: gamma must be >= 0");
  }
  if (!(epsilon > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "prox: epsilon must be > 0");
  }
}

double bregman_divergence(Family family, const SymMatrix& x, const SymMatrix& y) {
  if (x.dim() != y.dim()) {
    throw Error(ErrorKind::InvalidInput, "bregman_divergence: dimension mismatch");
  }
  switch (family) {
    case Family::SFN:
      return (x.matrix() - y.matrix()).squaredNorm();
    case Family::VND: {
      const EigenDecomposition ex = sym_eig(x);
      const EigenDecomposition ey = sym_eig(y);
      require_spd(ex.values, "bregman_divergence");
      require_spd(ey.values, "bregman_divergence");
      const SymMatrix log_x = spectral_apply(ex, [](double v) { return std::log(v); });
      const SymMatrix log_y = spectral_apply(ey, [](double v) { return std::log(v); });
      const Matrix& xm = x.matrix();
      return (xm * log_x.matrix()).trace() - (xm * log_y.matrix()).trace() - xm.trace() +
             y.trace();
    }
    case Family::LDD: {
      const EigenDecomposition ex = sym_eig(x);
      const EigenDecomposition ey = sym_eig(y);
      require_spd(ex.values, "bregman_divergence");
      require_spd(ey.values, "bregman_divergence");
      const SymMatrix y_inv = spectral_apply(ey, [](double v) { return 1.0 / v; });
      const double logdet_x = ex.values.array().log().sum();
      const double logdet_y = ey.values.array().log().sum();
      return (x.matrix() * y_inv.matrix()).trace() - logdet_x + logdet_y -
             static_cast<double>(x.dim());
    }
  }
  return 0.0;
}

namespace {

EigenDecomposition gram_spectrum(Family family, const Matrix& a) {
  const SymMatrix gram(a * a.transpose());
  EigenDecomposition eig = sym_eig(gram);
  if (family != Family::SFN) {
    const double lmin = eig.values(eig.values.size() - 1);
    if (!(lmin > 1e-14 * std::max(1.0, eig.values(0)))) {
      throw Error(ErrorKind::Singular, "omega_nonconvex: AA^T is rank deficient");
    }
  }
  return eig;
}

}  // namespace

double omega_nonconvex(Family family, const Matrix& a) {
  if (a.rows() == 0) return 0.0;
  if (family == Family::SFN) {
    const Matrix gram = a * a.transpose();
    return (gram - Matrix::Identity(a.rows(), a.rows())).squaredNorm();
  }
  const EigenDecomposition eig = gram_spectrum(family, a);
  double sum = 0.0;
  for (Index i = 0; i < eig.values.size(); ++i) {
    const double l = eig.values(i);
    sum += family == Family::VND ? l * std::log(l) - l + 1.0 : l - std::log(l) - 1.0;
  }
  return sum;
}

Matrix grad_nonconvex(Family family, const Matrix& a) {
  if (a.rows() == 0) return Matrix::Zero(0, a.cols());
  const Index r = a.rows();
  if (family == Family::SFN) {
    const Matrix gram = a * a.transpose();
    return 4.0 * (gram - Matrix::Identity(r, r)) * a;
  }
  const EigenDecomposition eig = gram_spectrum(family, a);
  if (family == Family::VND) {
    const SymMatrix log_g = spectral_apply(eig, [](double v) { return std::log(v); });
    return 2.0 * log_g.matrix() * a;
  }
  const SymMatrix g_inv = spectral_apply(eig, [](double v) { return 1.0 / v; });
  return 2.0 * (Matrix::Identity(r, r) - g_inv.matrix()) * a;
}

double omega_convex_spectrum(const RegularizerSpec& spec, const Vector& eigenvalues) {
  spec.validate();
  require_psd(eigenvalues, "omega_convex");
  const double eps = spec.epsilon;
  double sum = 0.0;
  for (Index i = 0; i < eigenvalues.size(); ++i) {
    const double l = clamp0(eigenvalues(i));
    switch (spec.family) {
      case Family::SFN:
        sum += (l - 1.0) * (l - 1.0) + l;
        break;
      case Family::VND: {
        const double s = l + eps;
        sum += s * std::log(s) - s + 1.0 + l;
        break;
      }
      case Family::LDD: {
        const double s = l + eps;
        sum += s - std::log(s) - 1.0 - (1.0 + std::log(eps)) * l;
        break;
      }
    }
  }
  return sum;
}

double omega_convex(const RegularizerSpec& spec, const SymMatrix& m) {
  if (spec.family == Family::SFN) {
    // Exact in matrix form; the eigendecomposition only serves the PSD check.
    require_psd(sym_eig(m).values, "omega_convex");
    const Index d = m.dim();
    return (m.matrix() - Matrix::Identity(d, d)).squaredNorm() + m.trace();
  }
  return omega_convex_spectrum(spec, sym_eig(m).values);
}

double omega_convex(const RegularizerSpec& spec, const MahalanobisMetric& m) {
  return omega_convex_spectrum(spec, m.eigen().values);
}

SymMatrix grad_convex(const RegularizerSpec& spec, const SymMatrix& m) {
  spec.validate();
  const Index d = m.dim();
  const EigenDecomposition eig = sym_eig(m);
  require_psd(eig.values, "grad_convex");
  const double eps = spec.epsilon;
  switch (spec.family) {
    case Family::SFN:
      return SymMatrix(2.0 * m.matrix() - Matrix::Identity(d, d));
    case Family::VND:
      return spectral_apply(eig, [eps](double l) { return std::log(clamp0(l) + eps) + 1.0; });
    case Family::LDD: {
      const double log_inv_eps = -std::log(eps);
      return spectral_apply(eig, [eps, log_inv_eps](double l) {
        return -1.0 / (clamp0(l) + eps) + log_inv_eps;
      });
    }
  }
  return m;
}

double prox_scalar_objective(Family family, const ScalarProxProblem& p, double x) {
  const double quad = (x - p.lambda_tilde) * (x - p.lambda_tilde) / (2.0 * p.eta);
  if (p.gamma == 0.0) return quad;
  const double eps = p.epsilon;
  switch (family) {
    case Family::SFN:
      return quad + p.gamma * ((x - 1.0) * (x - 1.0) + x);
    case Family::VND:
      return quad + p.gamma * (x + eps) * std::log(x + eps);
    case Family::LDD:
      return quad + p.gamma * (-std::log(x + eps) - x * std::log(eps));
  }
  return quad;
}

LddQuadratic ldd_prox_quadratic(const ScalarProxProblem& p) {
  const double eg = p.eta * p.gamma;
  const double log_inv_eps = -std::log(p.epsilon);
  return LddQuadratic{
      p.epsilon - p.lambda_tilde + eg * log_inv_eps,
      p.epsilon * eg * log_inv_eps - p.epsilon * p.lambda_tilde - eg,
  };
}

namespace {

double pick_best(Family family, const ScalarProxProblem& p, const double* candidates,
                 std::size_t count) {
  double best_x = 0.0;
  double best_f = prox_scalar_objective(family, p, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = candidates[i];
    if (!(x >= 0.0) || !std::isfinite(x)) continue;
    const double f = prox_scalar_objective(family, p, x);
    if (f < best_f) {
      best_f = f;
      best_x = x;
    }
  }
  return best_x;
}

double ldd_bisection(const ScalarProxProblem& p) {
  const double log_inv_eps = -std::log(p.epsilon);
  auto deriv = [&](double x) {
    return (x - p.lambda_tilde) / p.eta + p.gamma * (log_inv_eps - 1.0 / (x + p.epsilon));
  };
  double lo = 0.0;
  double hi = std::max(p.lambda_tilde, 0.0) + 10.0;
  if (deriv(lo) >= 0.0) return 0.0;
  for (int iter = 0; iter < 400 && hi - lo > 1e-16 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (deriv(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double solve_ldd_prox(const ScalarProxProblem& p, const LddQuadratic& q) {
  const double disc = q.linear * q.linear - 4.0 * q.constant;
  std::array<double, 2> roots{std::numeric_limits<double>::quiet_NaN(),
                              std::numeric_limits<double>::quiet_NaN()};
  if (std::abs(disc) < 1e-14) {
    roots[0] = ldd_bisection(p);
  } else if (disc > 0.0) {
    const double s = std::sqrt(disc);
    const double t = -0.5 * (q.linear + std::copysign(s, q.linear));
    roots[0] = t;
    if (t != 0.0) roots[1] = q.constant / t;
  }
  return pick_best(Family::LDD, p, roots.data(), roots.size());
}

double prox_scalar(Family family, const ScalarProxProblem& p) {
  p.validate();
  const double eg = p.eta * p.gamma;
  if (eg < kTinyStep) return clamp0(p.lambda_tilde);
  switch (family) {
    case Family::SFN:
      return clamp0((p.lambda_tilde + eg) / (1.0 + 2.0 * eg));
    case Family::VND: {
      const double z = (p.epsilon - eg + p.lambda_tilde) / eg - std::log(eg);
      const double root = clamp0(eg * wright_omega(z) - p.epsilon);
      return pick_best(Family::VND, p, &root, 1);
    }
    case Family::LDD:
      return solve_ldd_prox(p, ldd_prox_quadratic(p));
  }
  return 0.0;
}

MahalanobisMetric prox_matrix(const RegularizerSpec& spec, const SymMatrix& m_tilde, double eta) {
  spec.validate();
  if (spec.form != Form::ConvexOnM) {
    throw Error(ErrorKind::InvalidInput, "prox_matrix needs a convex (on M) regularizer");
  }
  const EigenDecomposition eig = sym_eig(m_tilde);
  Vector x(eig.values.size());
  for (Index j = 0; j < x.size(); ++j) {
    x(j) = prox_scalar(spec.family, ScalarProxProblem{eig.values(j), eta, spec.gamma, spec.epsilon});
  }
  return MahalanobisMetric::from_eigen(x, eig.vectors);
}

}  // namespace odml
