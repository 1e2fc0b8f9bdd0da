#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "odml/data.hpp"
#include "odml/metric.hpp"

namespace odml {

enum class AucMode { Roc, PrecisionRecall };

/// Queries whose label passes the filter are scored against every other
/// example of the evaluation set.
using QueryFilter = std::function<bool(int label)>;

/// One query-candidate pair: squared distance and whether labels match.
struct ScoredPair {
  double distance = 0.0;
  bool positive = false;
  Index query = 0;
  Index candidate = 0;
};

/// Squared embedded distances ||P x_q - P x_c||^2 for every selected query q
/// and every candidate c != q. Throws EmptySelection if no query passes.
std::vector<ScoredPair> retrieval_pairs(const Matrix& projection, const Dataset& test,
                                        const QueryFilter& filter);

/// Area under the ROC (or precision-recall) curve of a pair list ranked by
/// ascending distance. Thresholds sit between consecutive distinct distances,
/// so tied pairs always fall on the same side.
double auc_from_pairs(std::vector<ScoredPair> pairs, AucMode mode = AucMode::Roc);

/// Distances come from L = psd_factorize(M) for a metric, or A directly.
double retrieval_auc(const MahalanobisMetric& metric, const Dataset& test,
                     const QueryFilter& filter, AucMode mode = AucMode::Roc,
                     double rank_tol = kDefaultRankTol);
double retrieval_auc(const ProjectionMatrix& projection, const Dataset& test,
                     const QueryFilter& filter, AucMode mode = AucMode::Roc);

/// |auc_if / auc_f - 1|; DomainError when auc_f == 0.
double balance_score(double auc_infrequent, double auc_frequent);
/// auc_all / npv; DomainError when npv == 0.
double compactness_score(double auc_all, Index npv);

/// max_{j<k} d_jk / min_{j<k} d_jk with d_jk = (mu_j - mu_k)^T M (mu_j - mu_k).
/// DegenerateMeans when some d_jk <= 1e-12.
double imbalance_factor(const SymMatrix& m, const Matrix& class_means);
double imbalance_factor(const MahalanobisMetric& m, const Matrix& class_means);
double imbalance_factor(const ProjectionMatrix& a, const Matrix& class_means);

Index npv(const MahalanobisMetric& m, double rank_tol = kDefaultRankTol);
Index npv(const ProjectionMatrix& a);

struct EvalOptions {
  double rank_tol = kDefaultRankTol;
  /// A class is frequent when its count in the reference data exceeds this.
  std::size_t frequent_threshold = 1000;
  AucMode auc_mode = AucMode::Roc;
};

/// Frequent class ids: those with more than `threshold` rows in `reference`.
std::set<int> frequent_classes(const Dataset& reference, std::size_t threshold);

struct EvalReport {
  double auc_all = 0.0;
  /// Absent when the evaluation set has no query of that group.
  std::optional<double> auc_frequent;
  std::optional<double> auc_infrequent;
  std::optional<double> balance_score;
  Index npv = 0;
  std::optional<double> compactness_score;
  std::optional<double> imbalance_factor;
  double train_auc = 0.0;
  double gap = 0.0;

  /// Field names as declared above; absent values are JSON null.
  std::string to_json() const;
  static std::string csv_header();
  std::string to_csv_row() const;
};

/// Retrieval report on `test`. Class frequency is judged on `train`, the
/// imbalance factor uses the training class means, and the gap is train AUC
/// minus test AUC.
EvalReport evaluate(const MahalanobisMetric& metric, const Dataset& train, const Dataset& test,
                    const EvalOptions& options = {});
EvalReport evaluate(const ProjectionMatrix& projection, const Dataset& train,
                    const Dataset& test, const EvalOptions& options = {});

}  // namespace odml
