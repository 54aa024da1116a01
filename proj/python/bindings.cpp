#include <map>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "prevsim/analysis.hpp"
#include "prevsim/commands.hpp"
#include "prevsim/config.hpp"
#include "prevsim/dataset.hpp"
#include "prevsim/error.hpp"
#include "prevsim/metrics.hpp"
#include "prevsim/roc.hpp"

namespace py = pybind11;
using namespace prevsim;

namespace {

ScoredPredictions to_predictions(const std::vector<double>& scores, const std::vector<int>& labels) {
  ScoredPredictions sp;
  sp.scores = scores;
  sp.labels.reserve(labels.size());
  for (int l : labels) {
    if (l != 0 && l != 1) throw Error(Errc::InvalidArgument, "labels must be 0 or 1");
    sp.labels.push_back(static_cast<std::uint8_t>(l));
  }
  return sp;
}

}  // namespace

PYBIND11_MODULE(_prevsim, m) {
  m.doc() = "Classifier metrics under shifting class prevalence";

  static py::exception<Error> error(m, "PrevsimError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object instance = py::reinterpret_borrow<py::object>(error.ptr())(std::string(errc_name(e.code())) + ": " + e.what());
      instance.attr("code") = errc_name(e.code());
      PyErr_SetObject(error.ptr(), instance.ptr());
    }
  });

  m.def(
      "metric",
      [](std::size_t tp, std::size_t fn, std::size_t tn, std::size_t fp, const std::string& name) {
        return metric(ConfusionMatrix{tp, fn, tn, fp}, MetricId::parse(name));
      },
      py::arg("tp"), py::arg("fn"), py::arg("tn"), py::arg("fp"), py::arg("name"),
      "One metric of a confusion matrix; names as in the CLI report (e.g. MCC, FBeta_0.5).");

  m.def(
      "all_metrics",
      [](std::size_t tp, std::size_t fn, std::size_t tn, std::size_t fp,
         const std::vector<double>& betas) {
        std::map<std::string, double> out;
        for (const auto& [id, v] : all_metrics(ConfusionMatrix{tp, fn, tn, fp}, betas)) {
          out[id.name()] = v.value;
        }
        return out;
      },
      py::arg("tp"), py::arg("fn"), py::arg("tn"), py::arg("fp"),
      py::arg("betas") = std::vector<double>{0.5, 2.0});

  m.def(
      "auc",
      [](const std::vector<double>& scores, const std::vector<int>& labels) {
        return auc(to_predictions(scores, labels));
      },
      py::arg("scores"), py::arg("labels"));

  m.def(
      "roc_curve",
      [](const std::vector<double>& scores, const std::vector<int>& labels) {
        std::vector<std::pair<double, double>> out;
        for (const auto& p : roc_curve(to_predictions(scores, labels)).points) {
          out.emplace_back(p.fpr, p.tpr);
        }
        return out;
      },
      py::arg("scores"), py::arg("labels"), "List of (fpr, tpr) points from (0, 0) to (1, 1).");

  m.def(
      "rank_models",
      [](const std::map<std::string, double>& values, const std::string& metric_name) {
        std::map<ModelKind, double> by_kind;
        for (const auto& [name, v] : values) by_kind[parse_model_kind(name)] = v;
        std::map<std::string, double> out;
        for (const auto& [kind, r] : rank_models(by_kind, MetricId::parse(metric_name).orientation())) {
          out[std::string(model_name(kind))] = r;
        }
        return out;
      },
      py::arg("values"), py::arg("metric"));

  m.def(
      "synth",
      [](std::size_t n, std::size_t features, double prevalence, double separation,
         std::uint64_t seed) {
        const auto ds = synth_dataset(n, features, prevalence, separation, Seed{seed});
        py::array_t<double> x({ds.rows(), ds.cols()});
        auto xv = x.mutable_unchecked<2>();
        for (std::size_t r = 0; r < ds.rows(); ++r) {
          for (std::size_t c = 0; c < ds.cols(); ++c) xv(r, c) = ds.features()(r, c);
        }
        py::array_t<std::uint8_t> y(ds.rows());
        auto yv = y.mutable_unchecked<1>();
        for (std::size_t r = 0; r < ds.rows(); ++r) yv(r) = ds.labels()[r];
        return py::make_tuple(x, y);
      },
      py::arg("n"), py::arg("features") = 5, py::arg("prevalence") = 0.45,
      py::arg("separation") = 0.5, py::arg("seed") = kDefaultSeed);

  m.def("default_config", &print_defaults);

  m.def(
      "run_sweep",
      [](const std::string& config_text) {
        const auto cfg = parse_config(config_text);
        SweepOutputs out;
        {
          py::gil_scoped_release release;
          out = cmd_sweep(cfg);
        }
        py::dict d;
        std::vector<std::string> files;
        for (const auto& f : out.files) files.push_back(f.string());
        d["files"] = files;
        d["scenarios"] = out.scenarios;
        d["records"] = out.records;
        return d;
      },
      py::arg("config_text"), "Runs a sweep from config text and returns what was written.");
}
