#pragma once

#include <string>
#include <variant>

#include "odml/metric.hpp"
#include "odml/regularizers.hpp"

namespace odml {

/// A persisted model: the learned object plus the regularizer it was
/// trained with.
struct SavedModel {
  std::variant<MahalanobisMetric, ProjectionMatrix> model;
  RegularizerSpec regularizer;
};

/// JSON with fields dim, eigenvalues, eigenvectors_row_major, regularizer,
/// config_hash (plus epochs_run, final_objective). Doubles round-trip
/// exactly (shortest representation).
std::string metric_to_json(const MahalanobisMetric& m, const RegularizerSpec& spec);
/// JSON with fields rows, dim, matrix_row_major, regularizer, config_hash.
std::string projection_to_json(const ProjectionMatrix& a, const RegularizerSpec& spec);

/// Parses either layout; throws ParseError on malformed input.
SavedModel model_from_json(const std::string& text);

void save_text(const std::string& path, const std::string& text);
std::string load_text(const std::string& path);

}  // namespace odml
