#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include <json.hpp>

#include "ciforge/core.hpp"
#include "ciforge/csv_io.hpp"
#include "ciforge/errors.hpp"
#include "ciforge/estimators.hpp"
#include "ciforge/evaluation.hpp"
#include "ciforge/metrics.hpp"
#include "ciforge/normal.hpp"
#include "ciforge/quantile.hpp"
#include "ciforge/report.hpp"
#include "ciforge/simulation.hpp"

namespace py = pybind11;
using namespace ciforge;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using LongArray = py::array_t<long long, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const DoubleArray& a) {
  if (a.ndim() != 1) throw InputError("expected a 1-d array");
  return {a.data(), a.data() + a.size()};
}

std::vector<std::uint8_t> to_labels(const LongArray& a) {
  if (a.ndim() != 1) throw InputError("labels must be a 1-d array");
  std::vector<std::uint8_t> out(static_cast<std::size_t>(a.size()));
  for (py::ssize_t i = 0; i < a.size(); ++i) {
    const long long v = a.data()[i];
    if (v != 0 && v != 1) throw InputError("labels must be 0 or 1");
    out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v);
  }
  return out;
}

PredictionMatrix matrix_from_arrays(const DoubleArray& scores, const LongArray& labels,
                                    const LongArray& folds) {
  if (scores.ndim() != 2) throw InputError("scores must be a 2-d array (samples x configs)");
  if (labels.ndim() != 1 || folds.ndim() != 1) throw InputError("labels and folds must be 1-d");
  const auto n = static_cast<std::size_t>(scores.shape(0));
  const auto c = static_cast<std::size_t>(scores.shape(1));
  if (static_cast<std::size_t>(labels.size()) != n || static_cast<std::size_t>(folds.size()) != n) {
    throw InputError("labels and folds must have one entry per row of scores");
  }
  std::vector<RawRow> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i].sample_id = std::to_string(i);
    rows[i].fold = folds.data()[i];
    rows[i].label = labels.data()[i];
    rows[i].scores.assign(scores.data() + i * c, scores.data() + (i + 1) * c);
    rows[i].line = i + 1;
  }
  return validate_matrix(rows);
}

DoubleArray matrix_scores(const PredictionMatrix& pm) {
  DoubleArray out({pm.samples(), pm.configs()});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t j = 0; j < pm.configs(); ++j) {
    const auto col = pm.column(j);
    for (std::size_t i = 0; i < pm.samples(); ++i) view(i, j) = col[i];
  }
  return out;
}

EstimatorConfig make_config(Method method, std::size_t bootstraps, double coverage,
                            const std::string& sided, const std::string& metric, double threshold,
                            std::uint64_t seed, std::size_t jobs) {
  EstimatorConfig cfg;
  cfg.method = method;
  cfg.bootstraps = bootstraps;
  cfg.coverage = coverage;
  cfg.sided = parse_sidedness(sided);
  cfg.metric = parse_metric(metric);
  cfg.metric.threshold = threshold;
  cfg.seed = seed;
  cfg.jobs = jobs;
  cfg.validate();
  return cfg;
}

template <class Fn>
void def_estimator(py::module_& m, const char* name, Method method, Fn fn, const char* doc) {
  m.def(
      name,
      [method, fn](const PredictionMatrix& pm, std::size_t bootstraps, double coverage,
                   const std::string& sided, const std::string& metric, double threshold,
                   std::uint64_t seed, std::size_t jobs) {
        const auto cfg = make_config(method, bootstraps, coverage, sided, metric, threshold, seed, jobs);
        py::gil_scoped_release release;
        return fn(pm, cfg);
      },
      py::arg("pm"), py::kw_only(), py::arg("bootstraps") = 1000, py::arg("coverage") = 0.95,
      py::arg("sided") = "one", py::arg("metric") = "auc", py::arg("threshold") = 0.5,
      py::arg("seed") = 0, py::arg("jobs") = 1, doc);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bootstrap bias-corrected confidence intervals for cross-validated model selection";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", base.ptr());
  py::register_exception<EstimationError>(m, "EstimationError", base.ptr());

  py::class_<PredictionMatrix>(m, "PredictionMatrix")
      .def(py::init(&matrix_from_arrays), py::arg("scores"), py::arg("labels"), py::arg("folds"),
           "scores: (samples, configs) float array; labels: 0/1; folds: any integer labels")
      .def_property_readonly("samples", &PredictionMatrix::samples)
      .def_property_readonly("configs", &PredictionMatrix::configs)
      .def_property_readonly("folds", &PredictionMatrix::folds)
      .def_property_readonly("scores", &matrix_scores)
      .def_property_readonly("labels",
                             [](const PredictionMatrix& pm) {
                               const auto l = pm.labels();
                               return py::array_t<std::uint8_t>(l.size(), l.data());
                             })
      .def_property_readonly("fold_of",
                             [](const PredictionMatrix& pm) {
                               const auto f = pm.fold_of();
                               return py::array_t<std::uint32_t>(f.size(), f.data());
                             })
      .def("__repr__", [](const PredictionMatrix& pm) {
        return "PredictionMatrix(samples=" + std::to_string(pm.samples()) +
               ", configs=" + std::to_string(pm.configs()) + ", folds=" + std::to_string(pm.folds()) + ")";
      });

  py::class_<EstimateResult>(m, "EstimateResult")
      .def_property_readonly("method", [](const EstimateResult& r) { return std::string(to_string(r.method)); })
      .def_readonly("winner", &EstimateResult::winner)
      .def_readonly("point_estimate", &EstimateResult::point_estimate)
      .def_readonly("ci_low", &EstimateResult::ci_low)
      .def_readonly("ci_high", &EstimateResult::ci_high)
      .def_readonly("attempts", &EstimateResult::attempts)
      .def_property_readonly("bootstrap_values",
                             [](const EstimateResult& r) {
                               return py::array_t<double>(r.bootstrap_values.size(), r.bootstrap_values.data());
                             })
      .def("__repr__", [](const EstimateResult& r) {
        return "EstimateResult(method=" + std::string(to_string(r.method)) +
               ", winner=" + std::to_string(r.winner) + ", point_estimate=" + format_double(r.point_estimate) +
               ", ci=(" + format_double(r.ci_low) + ", " + format_double(r.ci_high) + "))";
      });

  m.def(
      "read_prediction_csv", [](const std::string& path) { return read_prediction_csv(path); },
      py::arg("path"));
  m.def(
      "write_prediction_csv",
      [](const std::string& path, const PredictionMatrix& pm) { write_prediction_csv(path, pm); },
      py::arg("path"), py::arg("pm"));

  m.def(
      "auc",
      [](const DoubleArray& scores, const LongArray& labels) {
        return auc(to_vector(scores), to_labels(labels));
      },
      py::arg("scores"), py::arg("labels"), "Mann-Whitney AUC with ties counted as one half");
  m.def(
      "accuracy",
      [](const DoubleArray& scores, const LongArray& labels, double threshold) {
        return accuracy(to_vector(scores), to_labels(labels), threshold);
      },
      py::arg("scores"), py::arg("labels"), py::arg("threshold") = 0.5);

  m.def(
      "fold_performance",
      [](const PredictionMatrix& pm, const std::string& metric) {
        const auto perf = fold_performance(pm, parse_metric(metric));
        DoubleArray out({perf.folds(), perf.configs()});
        auto view = out.mutable_unchecked<2>();
        for (std::size_t k = 0; k < perf.folds(); ++k) {
          for (std::size_t j = 0; j < perf.configs(); ++j) view(k, j) = perf.at(k, j);
        }
        return out;
      },
      py::arg("pm"), py::arg("metric") = "auc", "(folds, configs) array of per-fold metric values");

  m.def(
      "empirical_quantile",
      [](const DoubleArray& values, double q, bool lower) {
        return empirical_quantile(to_vector(values), q,
                                  lower ? QuantileRule::LowerOrderStatistic : QuantileRule::Interpolated);
      },
      py::arg("values"), py::arg("q"), py::arg("lower") = false);
  m.def(
      "ci_from_bootstrap",
      [](const DoubleArray& values, double coverage, const std::string& sided) {
        const auto ci = ci_from_bootstrap(to_vector(values), coverage, parse_sidedness(sided));
        return py::make_tuple(ci.low, ci.high);
      },
      py::arg("values"), py::arg("coverage") = 0.95, py::arg("sided") = "one");

  m.def("normal_cdf", &normal_cdf, py::arg("z"));
  m.def("normal_quantile", &normal_quantile, py::arg("p"));
  m.def("mu_from_auc", &mu_from_auc, py::arg("auc"));

  m.def(
      "exact_binomial_test",
      [](std::size_t successes, std::size_t n, double p0, double level) {
        const auto t = exact_binomial_test(successes, n, p0, level);
        return py::make_tuple(t.p_value, t.reject);
      },
      py::arg("successes"), py::arg("n"), py::arg("p0") = 0.95, py::arg("level") = 0.05,
      "Returns (p_value, reject) for H0: p >= p0");

  def_estimator(m, "bbc", Method::Bbc, &bbc, "Bootstrap bias correction over samples");
  def_estimator(m, "bbc_f", Method::BbcF, &bbc_f, "Bootstrap bias correction over folds");
  def_estimator(m, "naive_bootstrap", Method::Naive, &naive_bootstrap,
                "Bootstrap of the full-data winner, without selection");

  m.def(
      "simulate",
      [](std::size_t n, std::size_t configs, double balance, double alpha, double beta,
         std::uint64_t seed, std::size_t rep) {
        SimScenario s;
        s.samples = n;
        s.configs = configs;
        s.balance = balance;
        s.alpha = alpha;
        s.beta = beta;
        s.seed = seed;
        s.validate();
        auto data = generate_scenario(s, rep);
        return py::make_tuple(std::move(data.pm),
                              py::array_t<double>(data.true_auc.size(), data.true_auc.data()));
      },
      py::kw_only(), py::arg("n") = 500, py::arg("configs") = 100, py::arg("balance") = 0.5,
      py::arg("alpha") = 24.0, py::arg("beta") = 6.0, py::arg("seed") = 1, py::arg("rep") = 0,
      "Returns (PredictionMatrix, true_auc)");

  m.def(
      "run_benchmark_json",
      [](const std::string& spec_json, std::size_t jobs) {
        nlohmann::json doc;
        try {
          doc = nlohmann::json::parse(spec_json);
        } catch (const nlohmann::json::exception& e) {
          throw InputError(std::string("spec is not valid JSON: ") + e.what());
        }
        auto spec = spec_from_json(doc);
        spec.jobs = jobs;
        BenchmarkReport report;
        {
          py::gil_scoped_release release;
          report = run_benchmark(spec);
        }
        return benchmark_to_json(report).dump();
      },
      py::arg("spec_json"), py::arg("jobs") = 1);
}
