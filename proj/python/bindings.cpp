#include <sstream>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "cli.hpp"
#include "odml/odml.hpp"

namespace py = pybind11;
using namespace odml;

namespace {

Dataset make_dataset(const Matrix& x, const std::vector<int>& y) { return Dataset(x, y); }

RegularizerSpec make_spec(const std::string& name, double gamma, double epsilon) {
  RegularizerSpec spec = RegularizerSpec::parse(name);
  spec.gamma = gamma;
  spec.epsilon = epsilon;
  return spec;
}

py::dict log_dict(const TrainLog& log) {
  std::vector<int> epoch;
  std::vector<double> objective;
  std::vector<double> reg;
  std::vector<Index> rank;
  for (const auto& e : log.epochs) {
    epoch.push_back(e.epoch);
    objective.push_back(e.objective);
    reg.push_back(e.regularizer_value);
    rank.push_back(e.rank);
  }
  py::dict d;
  d["epoch"] = epoch;
  d["objective"] = objective;
  d["regularizer_value"] = reg;
  d["rank"] = rank;
  return d;
}

}  // namespace

PYBIND11_MODULE(_odml, m) {
  m.doc() = "Distance metric learning with orthogonality-promoting regularizers";

  static py::exception<Error> error(m, "OdmlError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), e.what());
    }
  });

  m.def("sym_eig", [](const Matrix& a) {
    const EigenDecomposition e = sym_eig(SymMatrix(a));
    return py::make_tuple(e.values, e.vectors);
  });
  m.def("wright_omega", &wright_omega);
  m.def("psd_factorize", [](const Matrix& a, double tol) { return psd_factorize(SymMatrix(a), tol); },
        py::arg("m"), py::arg("rank_tol") = kDefaultRankTol);

  m.def("omega_convex",
        [](const std::string& name, const Matrix& a, double epsilon) {
          return omega_convex(make_spec(name, 1.0, epsilon), SymMatrix(a));
        },
        py::arg("name"), py::arg("m"), py::arg("epsilon") = 1e-5);
  m.def("grad_convex",
        [](const std::string& name, const Matrix& a, double epsilon) {
          return grad_convex(make_spec(name, 1.0, epsilon), SymMatrix(a)).matrix();
        },
        py::arg("name"), py::arg("m"), py::arg("epsilon") = 1e-5);
  m.def("omega_nonconvex", [](const std::string& family, const Matrix& a) {
    return omega_nonconvex(parse_family(family), a);
  });
  m.def("prox_scalar",
        [](const std::string& family, double lambda_tilde, double eta, double gamma,
           double epsilon) {
          return prox_scalar(parse_family(family),
                             ScalarProxProblem{lambda_tilde, eta, gamma, epsilon});
        },
        py::arg("family"), py::arg("lambda_tilde"), py::arg("eta"), py::arg("gamma"),
        py::arg("epsilon") = 1e-5);
  m.def("prox_matrix",
        [](const std::string& name, const Matrix& a, double eta, double gamma, double epsilon) {
          return prox_matrix(make_spec(name, gamma, epsilon), SymMatrix(a), eta).matrix().matrix();
        },
        py::arg("name"), py::arg("m_tilde"), py::arg("eta"), py::arg("gamma"),
        py::arg("epsilon") = 1e-5);

  m.def("synth_generate",
        [](int num_classes, int dim, const std::vector<int>& sizes, double radius, double std,
           std::uint64_t seed) {
          SynthSpec s;
          s.num_classes = num_classes;
          s.dim = dim;
          s.class_sizes = sizes;
          s.sphere_radius = radius;
          s.within_class_std = std;
          s.seed = seed;
          const Dataset d = synth_generate(s);
          return py::make_tuple(d.features(), d.labels());
        },
        py::arg("num_classes"), py::arg("dim"), py::arg("class_sizes"),
        py::arg("sphere_radius") = 1.0, py::arg("within_class_std") = 1.0, py::arg("seed") = 0);
  m.def("load_csv", [](const std::string& path, bool has_header) {
    const Dataset d = load_csv(path, has_header);
    return py::make_tuple(d.features(), d.labels());
  }, py::arg("path"), py::arg("has_header") = false);

  m.def("train_mdml", [](const Matrix& x, const std::vector<int>& y, const std::string& config) {
    const TrainConfig c = cli::parse_train_config(nlohmann::json::parse(config));
    const MdmlResult r = [&] {
      py::gil_scoped_release release;
      return train_mdml(make_dataset(x, y), c);
    }();
    py::dict d;
    d["matrix"] = r.metric.matrix().matrix();
    d["eigenvalues"] = r.metric.eigen().values;
    d["eigenvectors"] = r.metric.eigen().vectors;
    d["model_json"] = metric_to_json(r.metric, c.regularizer);
    d["log"] = log_dict(r.log);
    return d;
  });
  m.def("train_pdml", [](const Matrix& x, const std::vector<int>& y, const std::string& config) {
    const TrainConfig c = cli::parse_train_config(nlohmann::json::parse(config));
    const PdmlResult r = [&] {
      py::gil_scoped_release release;
      return train_pdml(make_dataset(x, y), c);
    }();
    py::dict d;
    d["matrix"] = r.projection.matrix();
    d["model_json"] = projection_to_json(r.projection, c.regularizer);
    d["log"] = log_dict(r.log);
    d["restart_objectives"] = r.restart_objectives;
    return d;
  });
  m.def("evaluate_metric",
        [](const Matrix& metric, const Matrix& xtr, const std::vector<int>& ytr, const Matrix& xte,
           const std::vector<int>& yte, std::size_t frequent_threshold) {
          EvalOptions o;
          o.frequent_threshold = frequent_threshold;
          return evaluate(MahalanobisMetric::from_matrix(SymMatrix(metric)), make_dataset(xtr, ytr),
                          make_dataset(xte, yte), o)
              .to_json();
        },
        py::arg("metric"), py::arg("x_train"), py::arg("y_train"), py::arg("x_test"),
        py::arg("y_test"), py::arg("frequent_threshold") = 1000);

  m.def("balance_score", &balance_score);
  m.def("compactness_score", &compactness_score);
  m.def("f_curve", &f_curve);
  m.def("f_inverse", &f_inverse);
  m.def("check_trace_lemmas", [](const Matrix& a, double epsilon) {
    const TraceLemmaCheck c = check_trace_lemmas(SymMatrix(a), epsilon);
    py::dict d;
    d["trace"] = c.trace;
    d["vnd_slack"] = c.vnd_slack;
    d["ldd_slack"] = c.ldd_slack;
    d["vnd_holds"] = c.vnd_holds;
    d["ldd_holds"] = c.ldd_holds;
    return d;
  });

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run_cli(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  });
}
