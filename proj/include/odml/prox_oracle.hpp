#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "odml/regularizers.hpp"

namespace odml {

/// Brute-force minimizer of the scalar prox problem: 10^5-point grid on
/// [0, max(10, 3|lambda_tilde|)] refined by golden-section search to width
/// 1e-10. Carries its own copy of the objective so it shares no code path
/// with prox_scalar.
double prox_scalar_oracle(Family family, const ScalarProxProblem& p);

/// Objective used by the oracle.
double oracle_objective(Family family, const ScalarProxProblem& p, double x);

using ScalarProxSolver = std::function<double(Family, const ScalarProxProblem&)>;

struct ProxSuiteOptions {
  std::vector<Family> families{Family::SFN, Family::VND, Family::LDD};
  int trials_per_family = 1000;
  std::uint64_t seed = 20170611;
  bool gamma_zero_only = false;
  double objective_tolerance = 1e-8;
  double argument_tolerance = 1e-5;
  /// Defaults to prox_scalar.
  ScalarProxSolver solver;
};

struct ProxFamilyReport {
  Family family = Family::SFN;
  int trials = 0;
  int violations = 0;
  /// max over trials of f(closed form) - f(oracle)
  double max_objective_gap = 0.0;
  double max_argument_gap = 0.0;
};

struct ProxSuiteReport {
  std::vector<ProxFamilyReport> families;
  bool passed() const;
};

/// Randomized problems: lambda_tilde in [-5, 5], eta in [1e-4, 1],
/// gamma in [0, 10], epsilon in {1e-3, 1e-5, 1e-8}.
ProxSuiteReport run_prox_suite(const ProxSuiteOptions& options);

}  // namespace odml
