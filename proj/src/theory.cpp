#include "odml/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "odml/error.hpp"
#include "odml/random_matrices.hpp"

namespace odml {

namespace {
constexpr double kSlack = 1e-9;
}

double f_curve(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw Error(ErrorKind::DomainError, "f_curve: argument must be > 0");
  }
  if (c == 1.0) return 2.0;
  return std::pow(c, 1.0 / (c + 1.0)) * (1.0 + 1.0 / c);
}

double f_inverse(double v) {
  if (!(v > 1.0 && v <= 2.0)) {
    throw Error(ErrorKind::DomainError, "f_inverse: argument must lie in (1, 2]");
  }
  if (v == 2.0) return 1.0;
  double lo = 1.0;
  double hi = 2.0;
  while (f_curve(hi) > v) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) {
      throw Error(ErrorKind::NumericalFailure, "f_inverse: failed to bracket");
    }
  }
  // f is decreasing on [lo, hi] with f(lo) > v >= f(hi).
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f_curve(mid) > v) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(f_curve(lo) - v) < std::abs(f_curve(hi) - v) ? lo : hi;
}

double vnd_imbalance_bound(double omega_vnd, double c_means) {
  if (!(omega_vnd < 1.0)) {
    throw Error(ErrorKind::BoundInapplicable, "VND imbalance bound needs Omega_vnd < 1");
  }
  if (omega_vnd < 0.0) {
    throw Error(ErrorKind::DomainError, "Omega_vnd must be >= 0");
  }
  return c_means * f_inverse(2.0 - omega_vnd);
}

double ldd_imbalance_bound(double omega_ldd, double c_means) {
  if (omega_ldd < 0.0) throw Error(ErrorKind::DomainError, "Omega_ldd must be >= 0");
  return 4.0 * c_means * std::exp(omega_ldd);
}

double mean_distance_ratio(const Matrix& class_means) {
  const Index k = class_means.rows();
  if (k < 2) throw Error(ErrorKind::InvalidInput, "mean_distance_ratio needs >= 2 means");
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (Index j = 0; j < k; ++j) {
    for (Index l = j + 1; l < k; ++l) {
      const double d = (class_means.row(j) - class_means.row(l)).squaredNorm();
      if (!(d > 1e-12)) throw Error(ErrorKind::DegenerateMeans, "two class means coincide");
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  }
  return hi / lo;
}

double gen_bound(Family family, const GenBoundInputs& in) {
  if (!(in.b > 0.0) || !(in.cap > 0.0) || !(in.tau > 0.0) || !(in.delta > 0.0 && in.delta < 1.0) ||
      in.m < 1) {
    throw Error(ErrorKind::InvalidInput, "gen_bound: invalid inputs");
  }
  const double b2 = in.b * in.b;
  const double conf = std::sqrt(2.0 * std::log(1.0 / in.delta));
  const double root_m = std::sqrt(static_cast<double>(in.m));
  switch (family) {
    case Family::VND:
      return (4.0 * b2 * in.cap + std::max(in.tau, b2 * in.cap) * conf) / root_m;
    case Family::LDD: {
      if (!(in.epsilon > 0.0 && in.epsilon < 1.0) || in.dim < 1) {
        throw Error(ErrorKind::InvalidInput, "gen_bound: CLDD needs epsilon in (0, 1) and D >= 1");
      }
      const double denom = std::log(1.0 / in.epsilon) - 1.0;
      if (!(denom > 0.0)) {
        throw Error(ErrorKind::DomainError, "gen_bound: CLDD needs log(1/epsilon) > 1");
      }
      const double trace_cap = (in.cap - static_cast<double>(in.dim) * in.epsilon) / denom;
      return (4.0 * b2 * in.cap / denom + std::max(in.tau, trace_cap) * conf) / root_m;
    }
    case Family::SFN:
      return (2.0 * b2 * std::min(2.0 * in.cap, std::sqrt(in.cap)) +
              std::max(in.tau, in.cap) * conf) /
             root_m;
  }
  return 0.0;
}

namespace {

TraceLemmaCheck trace_check(const Vector& eigenvalues, double epsilon) {
  const double denom = std::log(1.0 / epsilon) - 1.0;
  if (!(epsilon > 0.0 && epsilon < 1.0) || !(denom > 0.0)) {
    throw Error(ErrorKind::DomainError, "trace lemmas need epsilon in (0, 1) with log(1/eps) > 1");
  }
  RegularizerSpec vnd{Family::VND, Form::ConvexOnM, 1.0, epsilon};
  RegularizerSpec ldd{Family::LDD, Form::ConvexOnM, 1.0, epsilon};
  const double omega_v = omega_convex_spectrum(vnd, eigenvalues);
  const double omega_l = omega_convex_spectrum(ldd, eigenvalues);
  double trace = 0.0;
  for (Index i = 0; i < eigenvalues.size(); ++i) trace += std::max(eigenvalues(i), 0.0);
  const double d = static_cast<double>(eigenvalues.size());

  TraceLemmaCheck out;
  out.trace = trace;
  out.vnd_slack = omega_v - trace;
  out.ldd_slack = (omega_l - d * epsilon) / denom - trace;
  out.vnd_holds = out.vnd_slack >= -kSlack;
  out.ldd_holds = out.ldd_slack >= -kSlack;
  return out;
}

}  // namespace

TraceLemmaCheck check_trace_lemmas(const SymMatrix& m, double epsilon) {
  return trace_check(sym_eig(m).values, epsilon);
}

TraceLemmaCheck check_trace_lemmas(const MahalanobisMetric& m, double epsilon) {
  return trace_check(m.eigen().values, epsilon);
}

CondBoundCheck check_cond_bounds(const Matrix& a) {
  if (a.rows() < 1) throw Error(ErrorKind::InvalidInput, "check_cond_bounds: A has no rows");
  CondBoundCheck out;
  out.omega_vnd = omega_nonconvex(Family::VND, a);
  out.omega_ldd = omega_nonconvex(Family::LDD, a);
  out.cond = condition_number(SymMatrix(a * a.transpose()));
  out.ldd_bound = 4.0 * std::exp(out.omega_ldd);
  out.ldd_holds = out.cond <= out.ldd_bound + kSlack;
  if (out.omega_vnd < 1.0) {
    out.vnd_checked = true;
    out.vnd_bound = f_inverse(2.0 - std::max(out.omega_vnd, 0.0));
    out.vnd_holds = out.cond <= out.vnd_bound + kSlack;
  }
  return out;
}

TheorySweepReport run_theory_sweep(const TheorySweepOptions& options) {
  Rng rng(options.seed);
  TheorySweepReport r;
  r.min_vnd_slack = std::numeric_limits<double>::infinity();
  r.min_ldd_slack = std::numeric_limits<double>::infinity();
  std::uniform_int_distribution<Index> dim_dist(2, 20);
  std::uniform_int_distribution<int> eps_pick(0, 1);
  for (int t = 0; t < options.trace_trials; ++t) {
    const Index dim = dim_dist(rng);
    const double eps = options.epsilons[eps_pick(rng)];
    const TraceLemmaCheck c = check_trace_lemmas(random_psd(dim, rng), eps);
    ++r.trace_trials;
    if (!c.vnd_holds) ++r.trace_vnd_violations;
    if (!c.ldd_holds) ++r.trace_ldd_violations;
    r.min_vnd_slack = std::min(r.min_vnd_slack, c.vnd_slack);
    r.min_ldd_slack = std::min(r.min_ldd_slack, c.ldd_slack);
  }
  for (int t = 0; t < options.cond_trials; ++t) {
    const Index dim = dim_dist(rng);
    std::uniform_int_distribution<Index> rows_dist(1, dim - 1);
    const Index rows = rows_dist(rng);
    const Matrix a = random_near_orthonormal(rows, dim, options.sv_low, options.sv_high, rng);
    const CondBoundCheck c = check_cond_bounds(a);
    ++r.cond_trials;
    if (c.vnd_checked) {
      ++r.cond_vnd_checked;
      if (!c.vnd_holds) ++r.cond_vnd_violations;
    }
    if (!c.ldd_holds) ++r.cond_ldd_violations;
  }
  return r;
}

}  // namespace odml
