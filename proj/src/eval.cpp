#include "odml/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "odml/error.hpp"

namespace odml {

std::vector<ScoredPair> retrieval_pairs(const Matrix& projection, const Dataset& test,
                                        const QueryFilter& filter) {
  if (projection.cols() != test.dim()) {
    throw Error(ErrorKind::InvalidInput, "metric dimension does not match the evaluation data");
  }
  const Matrix embedded = test.features() * projection.transpose();
  const auto& labels = test.labels();
  const Index n = test.size();
  std::vector<ScoredPair> pairs;
  for (Index q = 0; q < n; ++q) {
    const int lq = labels[static_cast<std::size_t>(q)];
    if (!filter(lq)) continue;
    for (Index c = 0; c < n; ++c) {
      if (c == q) continue;
      const double d = (embedded.row(q) - embedded.row(c)).squaredNorm();
      pairs.push_back({d, labels[static_cast<std::size_t>(c)] == lq, q, c});
    }
  }
  if (pairs.empty()) {
    throw Error(ErrorKind::EmptySelection, "query filter selects no queries");
  }
  return pairs;
}

double auc_from_pairs(std::vector<ScoredPair> pairs, AucMode mode) {
  std::sort(pairs.begin(), pairs.end(),
            [](const ScoredPair& a, const ScoredPair& b) { return a.distance < b.distance; });
  double total_pos = 0.0;
  for (const auto& p : pairs) total_pos += p.positive ? 1.0 : 0.0;
  const double total_neg = static_cast<double>(pairs.size()) - total_pos;
  if (total_pos == 0.0 || total_neg == 0.0) {
    throw Error(ErrorKind::DomainError, "AUC needs both positive and negative pairs");
  }

  double tp = 0.0;
  double fp = 0.0;
  double area = 0.0;
  double prev_recall = 0.0;
  double prev_precision = -1.0;
  std::size_t i = 0;
  while (i < pairs.size()) {
    const double d = pairs[i].distance;
    double group_pos = 0.0;
    double group_neg = 0.0;
    while (i < pairs.size() && pairs[i].distance == d) {
      (pairs[i].positive ? group_pos : group_neg) += 1.0;
      ++i;
    }
    if (mode == AucMode::Roc) {
      area += (group_neg / total_neg) * (2.0 * tp + group_pos) / (2.0 * total_pos);
      tp += group_pos;
      fp += group_neg;
    } else {
      tp += group_pos;
      fp += group_neg;
      const double recall = tp / total_pos;
      const double precision = tp / (tp + fp);
      if (prev_precision < 0.0) prev_precision = precision;
      area += (recall - prev_recall) * (precision + prev_precision) / 2.0;
      prev_recall = recall;
      prev_precision = precision;
    }
  }
  return area;
}

double retrieval_auc(const MahalanobisMetric& metric, const Dataset& test,
                     const QueryFilter& filter, AucMode mode, double rank_tol) {
  const Matrix l = psd_factorize(metric.eigen(), rank_tol);
  return auc_from_pairs(retrieval_pairs(l, test, filter), mode);
}

double retrieval_auc(const ProjectionMatrix& projection, const Dataset& test,
                     const QueryFilter& filter, AucMode mode) {
  return auc_from_pairs(retrieval_pairs(projection.matrix(), test, filter), mode);
}

double balance_score(double auc_infrequent, double auc_frequent) {
  if (auc_frequent == 0.0) {
    throw Error(ErrorKind::DomainError, "balance_score: frequent-class AUC is zero");
  }
  return std::abs(auc_infrequent / auc_frequent - 1.0);
}

double compactness_score(double auc_all, Index npv) {
  if (npv <= 0) throw Error(ErrorKind::DomainError, "compactness_score: NPV is zero");
  return auc_all / static_cast<double>(npv);
}

double imbalance_factor(const SymMatrix& m, const Matrix& class_means) {
  const Index k = class_means.rows();
  if (k < 2) throw Error(ErrorKind::InvalidInput, "imbalance_factor needs at least 2 classes");
  if (class_means.cols() != m.dim()) {
    throw Error(ErrorKind::InvalidInput, "imbalance_factor: dimension mismatch");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (Index j = 0; j < k; ++j) {
    for (Index l = j + 1; l < k; ++l) {
      const Vector diff = (class_means.row(j) - class_means.row(l)).transpose();
      const double d = diff.dot(m.matrix() * diff);
      if (!(d > 1e-12)) {
        throw Error(ErrorKind::DegenerateMeans,
                    "class means " + std::to_string(j) + " and " + std::to_string(l) +
                        " coincide under the metric");
      }
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  }
  return hi / lo;
}

double imbalance_factor(const MahalanobisMetric& m, const Matrix& class_means) {
  return imbalance_factor(m.matrix(), class_means);
}

double imbalance_factor(const ProjectionMatrix& a, const Matrix& class_means) {
  return imbalance_factor(a.mahalanobis(), class_means);
}

Index npv(const MahalanobisMetric& m, double rank_tol) {
  return count_above(m.eigen().values, rank_tol);
}

Index npv(const ProjectionMatrix& a) { return a.rows(); }

std::set<int> frequent_classes(const Dataset& reference, std::size_t threshold) {
  std::set<int> out;
  for (const auto& [label, rows] : reference.class_index()) {
    if (rows.size() > threshold) out.insert(label);
  }
  return out;
}

namespace {

nlohmann::json opt(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::string cell(const std::optional<double>& v) {
  if (!v) return "";
  return format_real(*v);
}

std::optional<double> group_auc(const std::vector<ScoredPair>& pairs, const Dataset& test,
                                const QueryFilter& filter, AucMode mode) {
  std::vector<ScoredPair> selected;
  for (const auto& p : pairs) {
    if (filter(test.labels()[static_cast<std::size_t>(p.query)])) selected.push_back(p);
  }
  if (selected.empty()) return std::nullopt;
  return auc_from_pairs(std::move(selected), mode);
}

EvalReport evaluate_projection(const Matrix& projection, Index npv_value, const SymMatrix& m,
                               const Dataset& train, const Dataset& test,
                               const EvalOptions& options) {
  const std::set<int> frequent = frequent_classes(train, options.frequent_threshold);
  const QueryFilter all = [](int) { return true; };
  const QueryFilter is_freq = [&frequent](int l) { return frequent.count(l) > 0; };
  const QueryFilter is_infreq = [&frequent](int l) { return frequent.count(l) == 0; };

  EvalReport r;
  const std::vector<ScoredPair> pairs = retrieval_pairs(projection, test, all);
  r.auc_all = auc_from_pairs(pairs, options.auc_mode);
  r.auc_frequent = group_auc(pairs, test, is_freq, options.auc_mode);
  r.auc_infrequent = group_auc(pairs, test, is_infreq, options.auc_mode);
  if (r.auc_frequent && r.auc_infrequent && *r.auc_frequent > 0.0) {
    r.balance_score = balance_score(*r.auc_infrequent, *r.auc_frequent);
  }
  r.npv = npv_value;
  if (npv_value > 0) r.compactness_score = compactness_score(r.auc_all, npv_value);
  if (train.num_classes() >= 2) {
    try {
      r.imbalance_factor = imbalance_factor(m, train.class_means());
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateMeans) throw;
    }
  }
  r.train_auc = auc_from_pairs(retrieval_pairs(projection, train, all), options.auc_mode);
  r.gap = r.train_auc - r.auc_all;
  return r;
}

}  // namespace

EvalReport evaluate(const MahalanobisMetric& metric, const Dataset& train, const Dataset& test,
                    const EvalOptions& options) {
  const Matrix l = psd_factorize(metric.eigen(), options.rank_tol);
  return evaluate_projection(l, npv(metric, options.rank_tol), metric.matrix(), train, test,
                             options);
}

EvalReport evaluate(const ProjectionMatrix& projection, const Dataset& train,
                    const Dataset& test, const EvalOptions& options) {
  return evaluate_projection(projection.matrix(), npv(projection), projection.mahalanobis(),
                             train, test, options);
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["auc_all"] = auc_all;
  j["auc_frequent"] = opt(auc_frequent);
  j["auc_infrequent"] = opt(auc_infrequent);
  j["balance_score"] = opt(balance_score);
  j["npv"] = npv;
  j["compactness_score"] = opt(compactness_score);
  j["imbalance_factor"] = opt(imbalance_factor);
  j["train_auc"] = train_auc;
  j["gap"] = gap;
  return j.dump(2) + "\n";
}

std::string EvalReport::csv_header() {
  return "auc_all,auc_frequent,auc_infrequent,balance_score,npv,compactness_score,"
         "imbalance_factor,train_auc,gap";
}

std::string EvalReport::to_csv_row() const {
  return cell(auc_all) + "," + cell(auc_frequent) + "," + cell(auc_infrequent) + "," +
         cell(balance_score) + "," + std::to_string(npv) + "," + cell(compactness_score) + "," +
         cell(imbalance_factor) + "," + cell(train_auc) + "," + cell(gap);
}

}  // namespace odml
