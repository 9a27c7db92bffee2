#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "capeval/corpus.hpp"
#include "capeval/ensemble.hpp"
#include "capeval/error.hpp"
#include "capeval/metrics.hpp"
#include "capeval/stats.hpp"
#include "capeval/textnorm.hpp"
#include "cli/commands.hpp"

namespace py = pybind11;
using namespace capeval;

namespace {

std::vector<NativeMetric> metrics_from_names(const std::vector<std::string>& names) {
  std::vector<NativeMetric> out;
  for (const auto& n : names) {
    auto m = parse_native_metric(n);
    if (!m) throw ConfigError("unknown metric '" + n + "'");
    out.push_back(*m);
  }
  return out;
}

ScoreMatrix matrix_from(const Eigen::MatrixXd& X, const std::vector<std::string>& names) {
  if (static_cast<std::size_t>(X.cols()) != names.size()) throw ConfigError("one name per column required");
  std::vector<std::string> ids;
  for (Eigen::Index i = 0; i < X.rows(); ++i) ids.push_back(std::to_string(i));
  ScoreMatrix m(ids, names);
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index j = 0; j < X.cols(); ++j)
      m.set(static_cast<std::size_t>(i), static_cast<std::size_t>(j), X(i, j));
  return m;
}

py::dict model_dict(const EnsembleModel& m) {
  py::dict d;
  d["metrics"] = m.metrics;
  d["weights"] = m.weights;
  d["intercept"] = m.intercept;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "capeval core bindings";

  auto& base = py::register_exception<Error>(m, "CapevalError");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

  m.def("tokenize", &tokenize, py::arg("text"));
  m.def("stem", &stem, py::arg("token"));
  m.def("ngrams", [](const TokenSeq& seq, int n) { return ngrams(seq, n).counts; }, py::arg("tokens"),
        py::arg("n"));

  m.def(
      "score_texts",
      [](const std::vector<std::string>& candidates, const std::vector<std::vector<std::string>>& references,
         const std::vector<std::string>& metrics, int jobs) {
        ScoringOptions opts;
        opts.jobs = jobs;
        const auto ms = metrics_from_names(metrics);
        py::gil_scoped_release release;
        return score_texts(candidates, references, ms, opts);
      },
      py::arg("candidates"), py::arg("references"), py::arg("metrics"), py::arg("jobs") = 1,
      "Rows of scores, one per candidate, columns in `metrics` order.");

  m.def("pearson", [](const std::vector<double>& x, const std::vector<double>& y) { return pearson(x, y); });
  m.def("kendall_tau_b",
        [](const std::vector<double>& x, const std::vector<double>& y) { return kendall_tau_b(x, y); });
  m.def("kendall_tau_c",
        [](const std::vector<double>& x, const std::vector<double>& y) { return kendall_tau_c(x, y); });

  m.def(
      "ols_fit",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
        auto fit = ols_fit(X, y);
        return py::make_tuple(fit.weights, fit.intercept);
      },
      py::arg("X"), py::arg("y"));
  m.def(
      "cv_r2",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<std::size_t>& subset, int folds) {
        return cv_r2(X, y, subset, folds);
      },
      py::arg("X"), py::arg("y"), py::arg("subset"), py::arg("folds") = 5);
  m.def(
      "forward_select",
      [](const Eigen::MatrixXd& X, const std::vector<double>& y, const std::vector<std::string>& names,
         double epsilon, int folds) {
        EnsembleConfig cfg;
        cfg.epsilon = epsilon;
        cfg.folds = folds;
        return forward_select(matrix_from(X, names), y, cfg).selected;
      },
      py::arg("X"), py::arg("y"), py::arg("names"), py::arg("epsilon") = 1e-4, py::arg("folds") = 5);
  m.def(
      "fit_ensemble",
      [](const Eigen::MatrixXd& X, const std::vector<double>& y, const std::vector<std::string>& names,
         double epsilon, int folds) {
        EnsembleConfig cfg;
        cfg.epsilon = epsilon;
        cfg.folds = folds;
        return model_dict(fit_ensemble(matrix_from(X, names), y, cfg));
      },
      py::arg("X"), py::arg("y"), py::arg("names"), py::arg("epsilon") = 1e-4, py::arg("folds") = 5);

  m.def("table2_model", [] { return model_dict(table2_model()); });
  m.def(
      "score_ensemble",
      [](const std::string& model_json, const std::map<std::string, double>& row) {
        return score_ensemble(model_from_json(model_json), row);
      },
      py::arg("model_json"), py::arg("row"));
  m.def("table2_model_json", [] { return model_to_json(table2_model()); });

  m.def(
      "load_dataset_summary",
      [](const std::string& path, const std::string& name) {
        auto dn = parse_dataset_name(name);
        if (!dn) throw ConfigError("unknown dataset name '" + name + "'");
        Notes notes;
        auto d = load_dataset(path, *dn, &notes);
        py::dict out;
        out["name"] = std::string(to_string(d.name));
        out["size"] = d.size();
        out["pairwise"] = d.is_pairwise();
        out["correlation_kind"] = std::string(to_string(d.correlation_kind));
        out["notes"] = notes;
        return out;
      },
      py::arg("path"), py::arg("name"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = cli::run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command line in-process; returns (exit_code, stdout, stderr).");
}
