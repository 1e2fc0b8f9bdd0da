#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "odml/error.hpp"
#include "odml/random_matrices.hpp"
#include "odml/theory.hpp"

using namespace odml;

TEST(FCurve, Anchors) {
  EXPECT_EQ(f_curve(1.0), 2.0);
  const double big = f_curve(1e6);
  EXPECT_GT(big, 1.0);
  EXPECT_LT(big, 1.0001);
  EXPECT_NEAR(f_curve(2.0), std::pow(2.0, 1.0 / 3.0) * 1.5, 1e-15);
  EXPECT_THROW(f_curve(0.0), Error);
}

TEST(FCurve, DecreasingAboveOne) {
  double prev = f_curve(1.0);
  for (double c = 1.1; c < 1e4; c *= 1.3) {
    const double v = f_curve(c);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(FInverse, ResidualAcrossDomain) {
  for (int i = 1; i <= 1000; ++i) {
    const double v = 1.0 + i * 1e-3;
    const double c = f_inverse(v);
    EXPECT_GE(c, 1.0);
    EXPECT_LE(std::abs(f_curve(c) - v), 1e-10) << v;
  }
  EXPECT_EQ(f_inverse(2.0), 1.0);
  EXPECT_THROW(f_inverse(1.0), Error);
  EXPECT_THROW(f_inverse(2.5), Error);
}

TEST(ImbalanceBounds, Values) {
  EXPECT_EQ(vnd_imbalance_bound(0.0, 3.0), 3.0);
  EXPECT_NEAR(ldd_imbalance_bound(0.5, 2.0), 8.0 * std::exp(0.5), 1e-14);
  try {
    vnd_imbalance_bound(1.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BoundInapplicable);
  }
}

TEST(MeanDistanceRatio, Basic) {
  Matrix means(3, 2);
  means << 0, 0, 1, 0, 0, 2;
  EXPECT_DOUBLE_EQ(mean_distance_ratio(means), 5.0);
  means.row(2) = means.row(1);
  EXPECT_THROW(mean_distance_ratio(means), Error);
}

TEST(GenBound, ScalesWithSampleSize) {
  GenBoundInputs in;
  in.m = 100;
  in.dim = 10;
  for (Family f : {Family::SFN, Family::VND, Family::LDD}) {
    const double a = gen_bound(f, in);
    in.m = 400;
    const double b = gen_bound(f, in);
    in.m = 100;
    EXPECT_NEAR(a / b, 2.0, 1e-12);
  }
}

TEST(GenBound, HandValues) {
  GenBoundInputs in;
  in.b = 1.0;
  in.cap = 4.0;
  in.tau = 1.0;
  in.delta = std::exp(-0.5);
  in.m = 1;
  EXPECT_NEAR(gen_bound(Family::VND, in), 16.0 + 4.0, 1e-12);
  EXPECT_NEAR(gen_bound(Family::SFN, in), 2.0 * 2.0 + 4.0, 1e-12);
}

TEST(GenBound, LddNeedsSmallEpsilon) {
  GenBoundInputs in;
  in.epsilon = 0.5;
  try {
    gen_bound(Family::LDD, in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DomainError);
  }
}

TEST(TraceLemmas, HoldOnRandomPsd) {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const Index d = 2 + t % 19;
    const TraceLemmaCheck c = check_trace_lemmas(random_psd(d, rng), t % 2 ? 1e-3 : 1e-5);
    EXPECT_TRUE(c.vnd_holds);
    EXPECT_TRUE(c.ldd_holds);
  }
}

TEST(TraceLemmas, ZeroMatrix) {
  const TraceLemmaCheck c = check_trace_lemmas(SymMatrix::zero(4), 1e-5);
  EXPECT_EQ(c.trace, 0.0);
  EXPECT_TRUE(c.vnd_holds);
  EXPECT_TRUE(c.ldd_holds);
}

// The log-determinant bound needs sum_i s(lambda_i + eps) >= D eps with
// s(x) = x - 1 - log x. At M = I that sum is D s(1 + eps) ~ D eps^2 / 2, so the
// bound fails by about D eps.
TEST(TraceLemmas, LogDetBoundFailsNearIdentity) {
  const double eps = 1e-5;
  const TraceLemmaCheck c = check_trace_lemmas(SymMatrix::identity(3), eps);
  EXPECT_TRUE(c.vnd_holds);
  EXPECT_FALSE(c.ldd_holds);
  const double s = (1.0 + eps) - 1.0 - std::log1p(eps);
  const double expected = (3.0 * s - 3.0 * eps) / (std::log(1.0 / eps) - 1.0);
  EXPECT_NEAR(c.ldd_slack, expected, 1e-12);
  EXPECT_NEAR(c.ldd_slack, -2.86e-6, 0.01e-6);
}

TEST(TraceLemmas, DomainError) {
  EXPECT_THROW(check_trace_lemmas(SymMatrix::identity(2), 0.5), Error);
}

TEST(CondBounds, OrthonormalRowsAreTight) {
  Rng rng(4);
  const CondBoundCheck c = check_cond_bounds(random_orthonormal_rows(3, 6, rng));
  EXPECT_NEAR(c.cond, 1.0, 1e-12);
  EXPECT_TRUE(c.vnd_checked);
  EXPECT_TRUE(c.vnd_holds);
  EXPECT_TRUE(c.ldd_holds);
}

TEST(CondBounds, HoldOnNearOrthonormal) {
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    const Index d = 3 + t % 15;
    const CondBoundCheck c = check_cond_bounds(random_near_orthonormal(1 + t % (d - 1), d, 0.7, 1.3, rng));
    EXPECT_TRUE(c.ldd_holds);
    if (c.vnd_checked) {
      EXPECT_TRUE(c.vnd_holds);
    }
  }
}

TEST(CondBounds, VndSkippedWhenOmegaLarge) {
  Matrix a = Matrix::Zero(2, 3);
  a(0, 0) = 3.0;
  a(1, 1) = 1.0;
  const CondBoundCheck c = check_cond_bounds(a);
  EXPECT_FALSE(c.vnd_checked);
  EXPECT_NEAR(c.cond, 9.0, 1e-12);
  EXPECT_TRUE(c.ldd_holds);
}

TEST(TheorySweep, SmallRunPasses) {
  TheorySweepOptions o;
  o.trace_trials = 50;
  o.cond_trials = 50;
  const TheorySweepReport r = run_theory_sweep(o);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.trace_trials, 50);
}

TEST(RandomMatrices, NearOrthonormalSingularValues) {
  Rng rng(6);
  const Matrix a = random_near_orthonormal(4, 9, 0.7, 1.3, rng);
  Eigen::JacobiSVD<Matrix> svd(a);
  EXPECT_GE(svd.singularValues().minCoeff(), 0.7 - 1e-12);
  EXPECT_LE(svd.singularValues().maxCoeff(), 1.3 + 1e-12);
}
