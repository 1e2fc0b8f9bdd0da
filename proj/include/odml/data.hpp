#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "odml/linalg.hpp"

namespace odml {

using Rng = std::mt19937_64;

/// Labeled examples. Immutable once built; the constructor validates that
/// N >= 2 and every feature is finite.
class Dataset {
 public:
  Dataset(Matrix features, std::vector<int> labels);

  Index size() const noexcept { return features_.rows(); }
  Index dim() const noexcept { return features_.cols(); }
  const Matrix& features() const noexcept { return features_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  /// class id -> row indices, ascending.
  const std::map<int, std::vector<Index>>& class_index() const noexcept { return class_index_; }
  std::size_t num_classes() const noexcept { return class_index_.size(); }

  /// New dataset holding the given rows, in the given order.
  Dataset subset(const std::vector<Index>& rows) const;
  /// K x D matrix of per-class means, rows in ascending class-id order.
  Matrix class_means() const;

 private:
  Matrix features_;
  std::vector<int> labels_;
  std::map<int, std::vector<Index>> class_index_;
};

/// Rows of x and y pair up; similar rows share a label, dissimilar rows do not.
struct PairBatch {
  Matrix similar_x;
  Matrix similar_y;
  Matrix dissimilar_x;
  Matrix dissimilar_y;

  Index num_similar() const noexcept { return similar_x.rows(); }
  Index num_dissimilar() const noexcept { return dissimilar_x.rows(); }
};

struct SynthSpec {
  int num_classes = 2;
  int dim = 2;
  std::vector<int> class_sizes{50, 50};
  /// K x D; when absent, means are drawn uniformly on the sphere of radius
  /// `sphere_radius`.
  std::optional<Matrix> means;
  double sphere_radius = 1.0;
  double within_class_std = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// CSV rows: integer class id, then D decimal features.
Dataset load_csv(const std::string& path, bool has_header = false);
Dataset parse_csv(const std::string& text, bool has_header = false);
void save_csv(const std::string& path, const Dataset& d);
std::string to_csv(const Dataset& d);

/// Columns mapped to [0, 1]; constant columns map to 0.
Dataset minmax_normalize(const Dataset& d);

struct PcaModel {
  Vector mean;
  /// D x k, orthonormal columns sorted by decreasing variance.
  Matrix components;
  /// Variance along each component.
  Vector variances;
  /// Total variance of the centered data.
  double total_variance = 0.0;

  Matrix project(const Matrix& features) const;
  Matrix back_project(const Matrix& reduced) const;
};

/// Throws InvalidInput unless 1 <= target_dim <= min(N, D).
PcaModel fit_pca(const Dataset& d, Index target_dim);
Dataset pca_reduce(const Dataset& d, Index target_dim);

/// batch_size / 2 similar pairs drawn uniformly over same-class pairs and
/// batch_size / 2 dissimilar pairs drawn uniformly over cross-class pairs,
/// with replacement.
PairBatch sample_batch(const Dataset& d, int batch_size, Rng& rng);

/// Every same-class pair and every cross-class pair (i < j) once.
PairBatch all_pairs(const Dataset& d);

/// Tops every class up to the largest class count with uniformly chosen
/// copies of its own rows. Original rows keep their order and come first.
Dataset oversample(const Dataset& d, Rng& rng);

/// Rows grouped by class, class k labeled k.
Dataset synth_generate(const SynthSpec& spec);

/// Per-class shuffled split. Classes with at least two members keep at least
/// one row on each side. Returns {train, test}.
std::pair<Dataset, Dataset> stratified_split(const Dataset& d, double test_fraction, Rng& rng);

}  // namespace odml
