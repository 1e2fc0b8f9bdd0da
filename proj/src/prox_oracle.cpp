#include "odml/prox_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace odml {

double oracle_objective(Family family, const ScalarProxProblem& p, double x) {
  const double d = x - p.lambda_tilde;
  double h = 0.0;
  switch (family) {
    case Family::SFN:
      h = (x - 1.0) * (x - 1.0) + x;
      break;
    case Family::VND:
      h = (x + p.epsilon) * std::log(x + p.epsilon);
      break;
    case Family::LDD:
      h = -std::log(x + p.epsilon) + x * std::log(1.0 / p.epsilon);
      break;
  }
  return d * d / (2.0 * p.eta) + (p.gamma == 0.0 ? 0.0 : p.gamma * h);
}

double prox_scalar_oracle(Family family, const ScalarProxProblem& p) {
  constexpr int kGrid = 100000;
  const double hi = std::max(10.0, 3.0 * std::abs(p.lambda_tilde));
  const double step = hi / kGrid;
  auto f = [&](double x) { return oracle_objective(family, p, x); };

  int best = 0;
  double best_f = f(0.0);
  for (int i = 1; i <= kGrid; ++i) {
    const double v = f(step * i);
    if (v < best_f) {
      best_f = v;
      best = i;
    }
  }

  // The objective is convex on x >= 0, so the minimizer lies within one grid
  // step of the best grid point.
  double a = std::max(0.0, step * (best - 1));
  double b = std::min(hi, step * (best + 1));
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > 1e-10) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const std::array<double, 4> candidates{0.5 * (a + b), a, b, step * best};
  double x_best = candidates[0];
  double f_best = f(x_best);
  for (double x : candidates) {
    const double v = f(x);
    if (v < f_best) {
      f_best = v;
      x_best = x;
    }
  }
  return x_best;
}

bool ProxSuiteReport::passed() const {
  return std::all_of(families.begin(), families.end(),
                     [](const ProxFamilyReport& r) { return r.violations == 0; });
}

ProxSuiteReport run_prox_suite(const ProxSuiteOptions& options) {
  const ScalarProxSolver solver =
      options.solver ? options.solver
                     : ScalarProxSolver([](Family fam, const ScalarProxProblem& p) {
                         return prox_scalar(fam, p);
                       });
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> lambda_dist(-5.0, 5.0);
  std::uniform_real_distribution<double> eta_dist(1e-4, 1.0);
  std::uniform_real_distribution<double> gamma_dist(0.0, 10.0);
  std::uniform_int_distribution<int> eps_pick(0, 2);
  constexpr std::array<double, 3> kEpsilons{1e-3, 1e-5, 1e-8};

  ProxSuiteReport report;
  for (Family family : options.families) {
    ProxFamilyReport fr;
    fr.family = family;
    for (int t = 0; t < options.trials_per_family; ++t) {
      ScalarProxProblem p;
      p.lambda_tilde = lambda_dist(rng);
      p.eta = eta_dist(rng);
      p.gamma = gamma_dist(rng);
      p.epsilon = kEpsilons[static_cast<std::size_t>(eps_pick(rng))];
      if (options.gamma_zero_only) p.gamma = 0.0;

      const double x = solver(family, p);
      const double x_ref = prox_scalar_oracle(family, p);
      const double obj_gap = oracle_objective(family, p, x) - oracle_objective(family, p, x_ref);
      const double arg_gap = std::abs(x - x_ref);
      ++fr.trials;
      fr.max_objective_gap = std::max(fr.max_objective_gap, obj_gap);
      fr.max_argument_gap = std::max(fr.max_argument_gap, arg_gap);
      const bool bad = !(x >= 0.0) || !(obj_gap <= options.objective_tolerance) ||
                       !(arg_gap <= options.argument_tolerance);
      if (bad) ++fr.violations;
    }
    report.families.push_back(fr);
  }
  return report;
}

}  // namespace odml
