#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "odml/data.hpp"
#include "odml/metric.hpp"
#include "odml/regularizers.hpp"

namespace odml {

struct TrainConfig {
  double stepsize = 1e-3;
  /// Even; split evenly between similar and dissimilar pairs.
  int batch_size = 100;
  double margin = 1.0;
  int max_epochs = 100;
  /// Stop once the probe objective changes by less than this, relatively,
  /// over one epoch. 0 disables the test.
  double rel_tol = 1e-6;
  std::uint64_t seed = 0;
  RegularizerSpec regularizer;
  /// Projection count R (PDML only).
  int npv = 10;
  /// Independent PDML runs; the lowest final objective wins.
  int restarts = 5;
  /// Mini-batches per epoch; 0 means max(1, N / batch_size).
  int iters_per_epoch = 0;
  /// Use every pair of the dataset as the batch; one step per epoch.
  bool full_batch = false;
  /// stepsize / sqrt(t) instead of a constant stepsize.
  bool decay_stepsize = false;
  /// Pairs in the fixed probe set used for the per-epoch objective.
  int probe_pairs = 2000;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double objective = 0.0;
  double regularizer_value = 0.0;
  Index rank = 0;
};

struct TrainLog {
  std::vector<EpochRecord> epochs;

  /// Header "epoch,objective,regularizer_value,rank" plus one line per epoch.
  std::string to_csv() const;
};

/// Mean similar-pair distance plus mean dissimilar-pair hinge
/// max(0, margin - z^T M z). Throws InvalidBatch if either side is empty.
double mdml_loss(const SymMatrix& m, const PairBatch& batch, double margin);
/// Subgradient of mdml_loss; pairs exactly at the hinge kink contribute 0.
SymMatrix mdml_subgradient(const SymMatrix& m, const PairBatch& batch, double margin);

/// mdml_loss with z^T M z replaced by ||A z||^2.
double pdml_loss(const Matrix& a, const PairBatch& batch, double margin);
/// Gradient of pdml_loss with respect to A (kink pairs contribute 0).
Matrix pdml_subgradient(const Matrix& a, const PairBatch& batch, double margin);

/// mdml_loss + gamma * omega_convex.
double mdml_objective(const MahalanobisMetric& m, const PairBatch& batch,
                      const TrainConfig& config);
/// pdml_loss + gamma * omega_nonconvex.
double pdml_objective(const Matrix& a, const PairBatch& batch, const TrainConfig& config);

struct MdmlResult {
  MahalanobisMetric metric;
  TrainLog log;
};

/// Stochastic proximal subgradient descent from M = I. Epoch 0 of the log
/// holds the initial objective.
MdmlResult train_mdml(const Dataset& data, const TrainConfig& config);

struct PdmlResult {
  ProjectionMatrix projection;
  /// Log of the winning restart.
  TrainLog log;
  /// Final objective of each restart, in restart order.
  std::vector<double> restart_objectives;
};

/// Stochastic subgradient descent on A, `restarts` times from seeded
/// N(0, 1/D) initializations.
PdmlResult train_pdml(const Dataset& data, const TrainConfig& config);

/// Stable 64-bit FNV-1a digest of the configuration, as 16 hex digits.
std::string config_hash(const TrainConfig& config);

}  // namespace odml
