#include "odml/model_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "odml/error.hpp"

namespace odml {

namespace {

using Json = nlohmann::ordered_json;

Json spec_json(const RegularizerSpec& spec) {
  Json j;
  j["name"] = spec.name();
  j["gamma"] = spec.gamma;
  j["epsilon"] = spec.epsilon;
  return j;
}

RegularizerSpec spec_from(const Json& j) {
  RegularizerSpec spec = RegularizerSpec::parse(j.at("name").get<std::string>());
  spec.gamma = j.at("gamma").get<double>();
  spec.epsilon = j.at("epsilon").get<double>();
  return spec;
}

Json provenance_json(const Provenance& p, Json j) {
  j["config_hash"] = p.config_hash;
  j["epochs_run"] = p.epochs_run;
  if (std::isfinite(p.final_objective)) {
    j["final_objective"] = p.final_objective;
  } else {
    j["final_objective"] = nullptr;
  }
  return j;
}

Provenance provenance_from(const Json& j) {
  Provenance p;
  p.config_hash = j.value("config_hash", std::string());
  p.epochs_run = j.value("epochs_run", 0);
  if (j.contains("final_objective") && !j.at("final_objective").is_null()) {
    p.final_objective = j.at("final_objective").get<double>();
  }
  return p;
}

}  // namespace

std::string metric_to_json(const MahalanobisMetric& m, const RegularizerSpec& spec) {
  const Index d = m.dim();
  const auto& eig = m.eigen();
  Json j;
  j["kind"] = "mahalanobis";
  j["dim"] = d;
  std::vector<double> values(eig.values.data(), eig.values.data() + d);
  j["eigenvalues"] = values;
  std::vector<double> vectors;
  vectors.reserve(static_cast<std::size_t>(d * d));
  for (Index r = 0; r < d; ++r) {
    for (Index c = 0; c < d; ++c) vectors.push_back(eig.vectors(r, c));
  }
  j["eigenvectors_row_major"] = vectors;
  j["regularizer"] = spec_json(spec);
  return provenance_json(m.provenance, j).dump(2) + "\n";
}

std::string projection_to_json(const ProjectionMatrix& a, const RegularizerSpec& spec) {
  Json j;
  j["kind"] = "projection";
  j["rows"] = a.rows();
  j["dim"] = a.dim();
  std::vector<double> entries;
  for (Index r = 0; r < a.rows(); ++r) {
    for (Index c = 0; c < a.dim(); ++c) entries.push_back(a.matrix()(r, c));
  }
  j["matrix_row_major"] = entries;
  j["regularizer"] = spec_json(spec);
  return provenance_json(a.provenance, j).dump(2) + "\n";
}

SavedModel model_from_json(const std::string& text) {
  try {
    const Json j = Json::parse(text);
    const std::string kind = j.value("kind", std::string("mahalanobis"));
    const RegularizerSpec spec = spec_from(j.at("regularizer"));
    if (kind == "projection") {
      const Index rows = j.at("rows").get<Index>();
      const Index dim = j.at("dim").get<Index>();
      const auto entries = j.at("matrix_row_major").get<std::vector<double>>();
      if (static_cast<Index>(entries.size()) != rows * dim) {
        throw Error(ErrorKind::ParseError, "matrix_row_major has the wrong length");
      }
      Matrix a(rows, dim);
      for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < dim; ++c) a(r, c) = entries[static_cast<std::size_t>(r * dim + c)];
      }
      ProjectionMatrix p(std::move(a));
      p.provenance = provenance_from(j);
      return SavedModel{std::move(p), spec};
    }
    const Index d = j.at("dim").get<Index>();
    const auto values = j.at("eigenvalues").get<std::vector<double>>();
    const auto vectors = j.at("eigenvectors_row_major").get<std::vector<double>>();
    if (static_cast<Index>(values.size()) != d || static_cast<Index>(vectors.size()) != d * d) {
      throw Error(ErrorKind::ParseError, "eigenpair arrays do not match dim");
    }
    Vector v(d);
    Matrix u(d, d);
    for (Index r = 0; r < d; ++r) {
      v(r) = values[static_cast<std::size_t>(r)];
      for (Index c = 0; c < d; ++c) u(r, c) = vectors[static_cast<std::size_t>(r * d + c)];
    }
    MahalanobisMetric m = MahalanobisMetric::from_eigen(v, u);
    m.provenance = provenance_from(j);
    return SavedModel{std::move(m), spec};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("model json: ") + e.what());
  }
}

void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed for '" + path + "'");
}

std::string load_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace odml
