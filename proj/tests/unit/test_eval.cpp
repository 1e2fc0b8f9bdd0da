#include <gtest/gtest.h>

#include <cmath>

#include <json.hpp>

#include "helpers.hpp"
#include "odml/error.hpp"
#include "odml/eval.hpp"

using namespace odml;

namespace {

// Mann-Whitney statistic by enumeration: P(d+ < d-) + P(d+ = d-) / 2.
double roc_by_enumeration(const std::vector<ScoredPair>& pairs) {
  double wins = 0.0;
  double count = 0.0;
  for (const auto& p : pairs) {
    if (!p.positive) continue;
    for (const auto& n : pairs) {
      if (n.positive) continue;
      count += 1.0;
      if (p.distance < n.distance) wins += 1.0;
      if (p.distance == n.distance) wins += 0.5;
    }
  }
  return wins / count;
}

std::vector<ScoredPair> scored(std::initializer_list<std::pair<double, bool>> items) {
  std::vector<ScoredPair> out;
  for (const auto& [d, pos] : items) out.push_back({d, pos, 0, 0});
  return out;
}

Dataset imbalanced(std::uint64_t seed) {
  SynthSpec s;
  s.num_classes = 4;
  s.dim = 3;
  s.class_sizes = {40, 40, 4, 4};
  s.sphere_radius = 3.0;
  s.seed = seed;
  return synth_generate(s);
}

}  // namespace

TEST(Auc, PerfectAndReversed) {
  EXPECT_DOUBLE_EQ(auc_from_pairs(scored({{0.1, true}, {0.2, true}, {0.5, false}})), 1.0);
  EXPECT_DOUBLE_EQ(auc_from_pairs(scored({{0.9, true}, {0.2, false}, {0.5, false}})), 0.0);
  EXPECT_DOUBLE_EQ(auc_from_pairs(scored({{0.1, true}, {0.2, true}, {0.5, false}}),
                                  AucMode::PrecisionRecall),
                   1.0);
}

TEST(Auc, AllTiedIsHalf) {
  EXPECT_DOUBLE_EQ(auc_from_pairs(scored({{1.0, true}, {1.0, false}, {1.0, false}})), 0.5);
}

TEST(Auc, MatchesEnumerationWithTies) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> dist(0, 20);
  std::bernoulli_distribution pos(0.3);
  for (int t = 0; t < 50; ++t) {
    std::vector<ScoredPair> pairs;
    for (int i = 0; i < 80; ++i) pairs.push_back({static_cast<double>(dist(rng)), pos(rng), 0, 0});
    pairs.push_back({0.0, true, 0, 0});
    pairs.push_back({0.0, false, 0, 0});
    EXPECT_NEAR(auc_from_pairs(pairs), roc_by_enumeration(pairs), 1e-12);
  }
}

TEST(Auc, PrecisionRecallHandExample) {
  // Ranking: +, -, +. Points (r, p): (0.5, 1), (0.5, 0.5), (1, 2/3).
  const double a = auc_from_pairs(scored({{1, true}, {2, false}, {3, true}}), AucMode::PrecisionRecall);
  EXPECT_NEAR(a, 0.5 * 1.0 + 0.5 * (0.5 + 2.0 / 3.0) / 2.0, 1e-15);
}

TEST(Auc, SingleClassIsDomainError) {
  try {
    auc_from_pairs(scored({{1, true}, {2, true}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DomainError);
  }
}

TEST(RetrievalPairs, CountsAndEmptySelection) {
  const Dataset d = imbalanced(1);
  const auto all = retrieval_pairs(Matrix::Identity(3, 3), d, [](int) { return true; });
  EXPECT_EQ(all.size(), 88u * 87u);
  const auto small = retrieval_pairs(Matrix::Identity(3, 3), d, [](int l) { return l >= 2; });
  EXPECT_EQ(small.size(), 8u * 87u);
  try {
    retrieval_pairs(Matrix::Identity(3, 3), d, [](int) { return false; });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptySelection);
  }
}

TEST(RetrievalAuc, InvariantToMetricScale) {
  const Dataset d = imbalanced(2);
  const auto m1 = MahalanobisMetric::identity(3);
  const auto m2 = MahalanobisMetric::from_matrix(SymMatrix(7.0 * Matrix::Identity(3, 3)));
  const auto all = [](int) { return true; };
  EXPECT_NEAR(retrieval_auc(m1, d, all), retrieval_auc(m2, d, all), 1e-12);
  EXPECT_NEAR(retrieval_auc(m1, d, all), retrieval_auc(ProjectionMatrix(Matrix::Identity(3, 3)), d, all),
              1e-12);
}

TEST(Scores, TableAnchors) {
  EXPECT_NEAR(balance_score(0.608, 0.654), 0.070, 5e-4);
  EXPECT_NEAR(compactness_score(0.634, 300), 2.1e-3, 0.05e-3);
  EXPECT_THROW(balance_score(0.5, 0.0), Error);
  EXPECT_THROW(compactness_score(0.5, 0), Error);
}

TEST(ImbalanceFactor, EuclideanAndScaleInvariant) {
  Matrix means(3, 2);
  means << 0, 0, 1, 0, 0, 3;
  EXPECT_DOUBLE_EQ(imbalance_factor(SymMatrix::identity(2), means), 10.0);
  EXPECT_DOUBLE_EQ(imbalance_factor(SymMatrix(4.0 * Matrix::Identity(2, 2)), means), 10.0);
  Matrix m = Matrix::Identity(2, 2);
  m(1, 1) = 1.0 / 9.0;
  EXPECT_NEAR(imbalance_factor(SymMatrix(m), means), 2.0, 1e-15);
}

TEST(ImbalanceFactor, DegenerateMeans) {
  Matrix means(2, 2);
  means << 0, 0, 0, 1;
  Matrix m = Matrix::Identity(2, 2);
  m(1, 1) = 0.0;
  try {
    imbalance_factor(SymMatrix(m), means);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateMeans);
  }
}

TEST(Npv, RankOfMetric) {
  Vector v(3);
  v << 2.0, 1e-12, 0.0;
  EXPECT_EQ(npv(MahalanobisMetric::from_eigen(v, Matrix::Identity(3, 3))), 1);
  EXPECT_EQ(npv(ProjectionMatrix(Matrix::Ones(4, 3))), 4);
}

TEST(Evaluate, ReportFields) {
  const Dataset d = imbalanced(3);
  EvalOptions o;
  o.frequent_threshold = 10;
  const EvalReport r = evaluate(MahalanobisMetric::identity(3), d, d, o);
  ASSERT_TRUE(r.auc_frequent && r.auc_infrequent && r.balance_score);
  EXPECT_NEAR(*r.balance_score, std::abs(*r.auc_infrequent / *r.auc_frequent - 1.0), 1e-15);
  EXPECT_EQ(r.npv, 3);
  EXPECT_NEAR(*r.compactness_score, r.auc_all / 3.0, 1e-15);
  EXPECT_NEAR(*r.imbalance_factor, imbalance_factor(SymMatrix::identity(3), d.class_means()), 1e-12);
  EXPECT_DOUBLE_EQ(r.gap, 0.0);

  const auto j = nlohmann::json::parse(r.to_json());
  for (const char* key : {"auc_all", "auc_frequent", "auc_infrequent", "balance_score", "npv",
                          "compactness_score", "imbalance_factor", "train_auc", "gap"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(EvalReport::csv_header(),
            "auc_all,auc_frequent,auc_infrequent,balance_score,npv,compactness_score,"
            "imbalance_factor,train_auc,gap");
}

TEST(Evaluate, NoFrequentClassesGivesNulls) {
  const Dataset d = imbalanced(4);
  const EvalReport r = evaluate(MahalanobisMetric::identity(3), d, d);
  EXPECT_FALSE(r.auc_frequent.has_value());
  EXPECT_FALSE(r.balance_score.has_value());
  ASSERT_TRUE(r.auc_infrequent.has_value());
  EXPECT_DOUBLE_EQ(*r.auc_infrequent, r.auc_all);
  const auto j = nlohmann::json::parse(r.to_json());
  EXPECT_TRUE(j["auc_frequent"].is_null());
}

TEST(FrequentClasses, CountThreshold) {
  const Dataset d = imbalanced(5);
  EXPECT_EQ(frequent_classes(d, 10), (std::set<int>{0, 1}));
  EXPECT_TRUE(frequent_classes(d, 40).empty());
}
