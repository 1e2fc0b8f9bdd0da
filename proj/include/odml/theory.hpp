#pragma once

#include <cstdint>

#include "odml/linalg.hpp"
#include "odml/metric.hpp"
#include "odml/regularizers.hpp"

namespace odml {

/// f(c) = c^{1/(c+1)} (1 + 1/c): increasing on (0, 1], decreasing on
/// [1, inf), f(1) = 2 and f -> 1 as c -> inf.
double f_curve(double c);

/// The c >= 1 with f(c) = v, for v in (1, 2]. Bisection on [1, c_hi] with
/// c_hi doubled until it brackets; residual |f(c) - v| <= 1e-10.
double f_inverse(double v);

/// C_means * f^{-1}(2 - omega_vnd); BoundInapplicable when omega_vnd >= 1.
double vnd_imbalance_bound(double omega_vnd, double c_means);
/// 4 C_means exp(omega_ldd).
double ldd_imbalance_bound(double omega_ldd, double c_means);

/// Ratio of the largest to the smallest squared Euclidean distance between
/// class means. This is the mean-geometry constant of the imbalance bounds,
/// unrelated to the hypothesis-class cap in GenBoundInputs.
double mean_distance_ratio(const Matrix& class_means);

struct GenBoundInputs {
  /// Bound on |v^T (x - y)| over unit v.
  double b = 1.0;
  /// Cap on the regularizer over the hypothesis class.
  double cap = 1.0;
  double tau = 1.0;
  double delta = 0.05;
  long m = 1;
  double epsilon = 1e-5;
  long dim = 1;
};

/// Generalization error bounds holding with probability >= 1 - delta, for
/// CSFN / CVND / CLDD (family selects which).
double gen_bound(Family family, const GenBoundInputs& in);

struct TraceLemmaCheck {
  double trace = 0.0;
  /// Omega_vnd(M) - tr(M).
  double vnd_slack = 0.0;
  /// (Omega_ldd(M) - D eps) / (log(1/eps) - 1) - tr(M).
  double ldd_slack = 0.0;
  bool vnd_holds = false;
  bool ldd_holds = false;
};

/// tr(M) <= Omega_vnd(M) and tr(M) <= (Omega_ldd(M) - D eps) / (log(1/eps) - 1),
/// each with 1e-9 slack. DomainError unless log(1/eps) > 1.
TraceLemmaCheck check_trace_lemmas(const SymMatrix& m, double epsilon);
TraceLemmaCheck check_trace_lemmas(const MahalanobisMetric& m, double epsilon);

struct CondBoundCheck {
  double cond = 0.0;
  double omega_vnd = 0.0;
  double omega_ldd = 0.0;
  /// f^{-1}(2 - Omega_vnd); only meaningful when vnd_checked.
  double vnd_bound = 0.0;
  /// 4 exp(Omega_ldd).
  double ldd_bound = 0.0;
  bool vnd_checked = false;
  bool vnd_holds = false;
  bool ldd_holds = false;
};

/// cond(AA^T) against both regularizer bounds (1e-9 slack). The VND bound is
/// only checked when Omega_vnd(A) < 1. Singular when AA^T is rank deficient.
CondBoundCheck check_cond_bounds(const Matrix& a);


struct TheorySweepOptions {
  int trace_trials = 500;
  /// Each trace trial draws epsilon uniformly from this pair.
  double epsilons[2] = {1e-3, 1e-5};
  int cond_trials = 1000;
  /// Singular value range of the near-orthonormal projections.
  double sv_low = 0.7;
  double sv_high = 1.3;
  std::uint64_t seed = 7;
};

struct TheorySweepReport {
  int trace_trials = 0;
  int trace_vnd_violations = 0;
  int trace_ldd_violations = 0;
  double min_vnd_slack = 0.0;
  double min_ldd_slack = 0.0;
  int cond_trials = 0;
  int cond_vnd_checked = 0;
  int cond_vnd_violations = 0;
  int cond_ldd_violations = 0;

  bool passed() const {
    return trace_vnd_violations == 0 && trace_ldd_violations == 0 && cond_vnd_violations == 0 &&
           cond_ldd_violations == 0;
  }
};

/// Trace lemmas over random PSD matrices (dims 2-20) and condition bounds
/// over random near-orthonormal projections.
TheorySweepReport run_theory_sweep(const TheorySweepOptions& options);

}  // namespace odml
