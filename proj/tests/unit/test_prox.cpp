#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "odml/error.hpp"
#include "odml/prox_oracle.hpp"
#include "odml/random_matrices.hpp"
#include "odml/regularizers.hpp"

using namespace odml;

namespace {

double derivative(Family f, const ScalarProxProblem& p, double x) {
  const double q = (x - p.lambda_tilde) / p.eta;
  switch (f) {
    case Family::SFN:
      return q + p.gamma * (2.0 * (x - 1.0) + 1.0);
    case Family::VND:
      return q + p.gamma * (std::log(x + p.epsilon) + 1.0);
    case Family::LDD:
      return q + p.gamma * (-1.0 / (x + p.epsilon) - std::log(p.epsilon));
  }
  return 0.0;
}

double matrix_prox_objective(const RegularizerSpec& s, const SymMatrix& m, const SymMatrix& mt,
                             double eta) {
  return (m.matrix() - mt.matrix()).squaredNorm() / (2.0 * eta) + s.gamma * omega_convex(s, m);
}

}  // namespace

TEST(ProxScalar, GammaZeroIsClampedIdentity) {
  for (Family f : {Family::SFN, Family::VND, Family::LDD}) {
    EXPECT_EQ(prox_scalar(f, {2.5, 0.3, 0.0, 1e-5}), 2.5);
    EXPECT_EQ(prox_scalar(f, {-1.0, 0.3, 0.0, 1e-5}), 0.0);
  }
}

TEST(ProxScalar, SfnClosedForm) {
  EXPECT_DOUBLE_EQ(prox_scalar(Family::SFN, {2.0, 1.0, 1.0, 1e-5}), 1.0);
  EXPECT_DOUBLE_EQ(prox_scalar(Family::SFN, {-3.0, 1.0, 1.0, 1e-5}), 0.0);
}

TEST(ProxScalar, StationaryWhenInterior) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> lam(-5.0, 5.0);
  std::uniform_real_distribution<double> eta(1e-3, 1.0);
  std::uniform_real_distribution<double> gam(0.01, 10.0);
  for (Family f : {Family::SFN, Family::VND, Family::LDD}) {
    for (int t = 0; t < 300; ++t) {
      const ScalarProxProblem p{lam(rng), eta(rng), gam(rng), 1e-3};
      const double x = prox_scalar(f, p);
      ASSERT_GE(x, 0.0);
      const double g = derivative(f, p, x);
      if (x > 1e-9) {
        EXPECT_NEAR(g, 0.0, 1e-7 * std::max(1.0, std::abs(p.lambda_tilde) / p.eta))
            << to_string(f) << " lt=" << p.lambda_tilde << " eta=" << p.eta << " g=" << p.gamma;
      } else {
        EXPECT_GE(g, -1e-7 / p.eta);
      }
    }
  }
}

TEST(ProxScalar, LogDetBarrierKeepsPositive) {
  for (double lt : {0.0, 1e-3, 2.0}) {
    for (double g : {1e-3, 1.0, 10.0}) {
      EXPECT_GT(prox_scalar(Family::LDD, {lt, 1e-3, g, 1e-5}), 0.0);
    }
  }
  // A strongly negative input with a weak barrier lands on the PSD boundary.
  EXPECT_EQ(prox_scalar(Family::LDD, {-0.5, 1e-3, 1e-3, 1e-5}), 0.0);
  EXPECT_GT(prox_scalar(Family::LDD, {-0.5, 1e-3, 10.0, 1e-5}), 0.0);
}

TEST(ProxScalar, QuadraticCoefficients) {
  const ScalarProxProblem p{1.5, 0.2, 3.0, 1e-3};
  const LddQuadratic q = ldd_prox_quadratic(p);
  const double eg = 0.6;
  const double l = std::log(1e3);
  EXPECT_NEAR(q.linear, 1e-3 - 1.5 + eg * l, 1e-14);
  EXPECT_NEAR(q.constant, 1e-3 * eg * l - 1e-3 * 1.5 - eg, 1e-14);
  const double x = solve_ldd_prox(p, q);
  EXPECT_NEAR(x * x + q.linear * x + q.constant, 0.0, 1e-12);
}

TEST(ProxScalar, RejectsBadInput) {
  EXPECT_THROW(prox_scalar(Family::SFN, {1.0, 0.0, 1.0, 1e-5}), Error);
  EXPECT_THROW(prox_scalar(Family::SFN, {1.0, 1.0, -1.0, 1e-5}), Error);
  EXPECT_THROW(prox_scalar(Family::VND, {std::nan(""), 1.0, 1.0, 1e-5}), Error);
}

TEST(ProxScalar, TinyStepTreatedAsNoRegularizer) {
  EXPECT_EQ(prox_scalar(Family::VND, {0.7, 1e-10, 1e-10, 1e-5}), 0.7);
}

TEST(ProxSuite, SmallRunPasses) {
  ProxSuiteOptions o;
  o.trials_per_family = 200;
  o.seed = 99;
  const ProxSuiteReport r = run_prox_suite(o);
  EXPECT_TRUE(r.passed());
  ASSERT_EQ(r.families.size(), 3u);
  for (const auto& f : r.families) EXPECT_LE(f.max_objective_gap, 1e-8);
}

TEST(ProxSuite, GammaZeroOnlyPasses) {
  ProxSuiteOptions o;
  o.trials_per_family = 100;
  o.gamma_zero_only = true;
  const ProxSuiteReport r = run_prox_suite(o);
  EXPECT_TRUE(r.passed());
  for (const auto& f : r.families) EXPECT_LE(f.max_argument_gap, 1e-9);
}

TEST(ProxSuite, WrongSignLddCoefficientFails) {
  ProxSuiteOptions o;
  o.families = {Family::LDD};
  o.trials_per_family = 100;
  o.solver = [](Family f, const ScalarProxProblem& p) {
    if (f != Family::LDD || p.eta * p.gamma < 1e-15) return prox_scalar(f, p);
    LddQuadratic q = ldd_prox_quadratic(p);
    const double eg = p.eta * p.gamma;
    q.constant += 2.0 * eg;
    return solve_ldd_prox(p, q);
  };
  const ProxSuiteReport r = run_prox_suite(o);
  EXPECT_FALSE(r.passed());
  EXPECT_GT(r.families[0].violations, 0);
}

TEST(ProxOracle, AgreesWithClosedFormOnKnownCase) {
  const ScalarProxProblem p{2.0, 1.0, 1.0, 1e-5};
  // Golden-section search resolves the argument to about sqrt(machine epsilon).
  EXPECT_NEAR(prox_scalar_oracle(Family::SFN, p), 1.0, 1e-7);
}

TEST(ProxMatrix, GammaZeroProjectsOntoPsdCone) {
  Matrix m(2, 2);
  m << 1.0, 2.0, 2.0, 1.0;
  const RegularizerSpec s{Family::VND, Form::ConvexOnM, 0.0, 1e-5};
  const MahalanobisMetric p = prox_matrix(s, SymMatrix(m), 0.1);
  Matrix expected(2, 2);
  expected << 1.5, 1.5, 1.5, 1.5;
  EXPECT_LE((p.matrix().matrix() - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ProxMatrix, MinimizesMatrixObjective) {
  std::mt19937_64 rng(5);
  for (Family f : {Family::SFN, Family::VND, Family::LDD}) {
    const RegularizerSpec s{f, Form::ConvexOnM, 0.5, 1e-3};
    const SymMatrix mt(odml::testing::random_symmetric(4, rng));
    const double eta = 0.3;
    const MahalanobisMetric p = prox_matrix(s, mt, eta);
    const double best = matrix_prox_objective(s, p.matrix(), mt, eta);
    for (int k = 0; k < 30; ++k) {
      const Matrix pert = p.matrix().matrix() + 1e-2 * random_psd(4, rng).matrix();
      EXPECT_GE(matrix_prox_objective(s, SymMatrix(pert), mt, eta), best - 1e-12);
    }
  }
}

TEST(ProxMatrix, RejectsNonconvexForm) {
  const RegularizerSpec s{Family::VND, Form::NonconvexOnA, 1.0, 1e-5};
  EXPECT_THROW(prox_matrix(s, SymMatrix::identity(2), 0.1), Error);
}
