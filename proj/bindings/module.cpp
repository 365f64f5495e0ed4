#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "medsensor/experiments.hpp"
#include "medsensor/metrics.hpp"
#include "medsensor/mlp.hpp"
#include "medsensor/pipeline.hpp"
#include "medsensor/synthgen.hpp"

namespace py = pybind11;
using namespace medsensor;

namespace {

// Dataset handle kept on the C++ side; experiments take it by reference.
struct PyDataset {
  WindowSpec spec;
  std::vector<FeatureVector> vectors;
};

PyDataset py_prepare(const std::string& root, std::size_t window,
                     double negative_ratio, std::uint64_t seed) {
  PrepareOptions opts;
  if (window > 0) opts.timesteps = window;
  opts.negative_ratio = negative_ratio;
  opts.seed = seed;
  auto result = prepare_store(root, opts);
  return {result.spec, std::move(result.vectors)};
}

py::dict py_run_experiment(int which, const PyDataset& dataset,
                           const std::vector<std::size_t>& hidden_sizes,
                           std::size_t epochs, double learning_rate,
                           std::uint64_t seed, std::size_t repeats,
                           std::size_t jobs) {
  SweepSpec sweep;
  if (!hidden_sizes.empty()) sweep.hidden_sizes = hidden_sizes;
  sweep.repeats = repeats;
  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.learning_rate = learning_rate;
  cfg.seed = seed;

  ExperimentReport report;
  if (which == 1) {
    std::vector<FeatureVector> protocol_only;
    for (const auto& v : dataset.vectors)
      if (v.style == GestureStyle::Protocol) protocol_only.push_back(v);
    report = run_exp1(protocol_only, sweep, cfg, 0.8, jobs);
  } else if (which == 2) {
    report = run_exp2(dataset.vectors, sweep, cfg, jobs);
  } else if (which == 3) {
    report = run_exp3(dataset.vectors, sweep, cfg, jobs);
  } else {
    throw std::invalid_argument("experiment must be 1, 2 or 3");
  }

  py::list rows;
  for (const auto& r : report.rows) {
    py::dict row;
    row["fold"] = r.fold_index;
    row["held_out"] = r.held_out_participant;
    row["hidden"] = r.hidden_size;
    row["repeat"] = r.repeat;
    row["train_accuracy"] = r.train_accuracy;
    row["test_accuracy"] = r.test_accuracy;
    row["train_size"] = r.train_size;
    row["test_size"] = r.test_size;
    row["failed"] = r.failed;
    rows.append(row);
  }
  py::dict out;
  out["experiment"] = report.experiment_id;
  out["rows"] = rows;
  out["detail_csv"] = detail_csv(report);
  out["summary_csv"] = summary_csv(report);
  out["table"] = table_text(report);
  out["any_failed"] = report.any_failed();
  return out;
}

}  // namespace

PYBIND11_MODULE(_medsensor, m) {
  m.doc() = "medication-gesture recognition pipeline bindings";

  py::class_<PyDataset>(m, "Dataset")
      .def_property_readonly("timesteps",
                             [](const PyDataset& d) { return d.spec.timesteps; })
      .def("__len__", [](const PyDataset& d) { return d.vectors.size(); })
      .def("values",
           [](const PyDataset& d, std::size_t i) { return d.vectors.at(i).values; })
      .def("label",
           [](const PyDataset& d, std::size_t i) {
             return d.vectors.at(i).label == Label::Medication ? 1 : 0;
           })
      .def("participant",
           [](const PyDataset& d, std::size_t i) {
             return d.vectors.at(i).participant_id;
           })
      .def("style", [](const PyDataset& d, std::size_t i) {
        return std::string(to_string(d.vectors.at(i).style));
      });

  m.def(
      "gen_store",
      [](const std::string& root, std::size_t participants, std::size_t sessions,
         std::size_t gestures, std::uint64_t seed, double sigma) {
        synthgen::StoreConfig cfg;
        cfg.participants = participants;
        cfg.sessions_per_style = sessions;
        cfg.gestures_per_session = gestures;
        cfg.master_seed = seed;
        cfg.noise_sigma = sigma;
        return synthgen::gen_store(root, cfg).entries.size();
      },
      py::arg("root"), py::arg("participants") = 12, py::arg("sessions") = 4,
      py::arg("gestures") = 5, py::arg("seed") = 0, py::arg("sigma") = 0.3,
      "Generate a synthetic store; returns the number of ground-truth entries.");

  m.def("prepare_store", &py_prepare, py::arg("root"), py::arg("window") = 0,
        py::arg("negative_ratio") = 1.0, py::arg("seed") = 0,
        "Scan, refine and vectorize a store into a Dataset.");

  m.def("run_experiment", &py_run_experiment, py::arg("which"), py::arg("dataset"),
        py::arg("hidden_sizes") = std::vector<std::size_t>{},
        py::arg("epochs") = 50, py::arg("learning_rate") = 1e-3,
        py::arg("seed") = 0, py::arg("repeats") = 1, py::arg("jobs") = 0,
        "Run experiment 1, 2 or 3 and return rows plus rendered reports.");

  m.def(
      "accuracy",
      [](const std::vector<int>& predictions, const std::vector<int>& labels) {
        return accuracy(confusion(predictions, labels));
      },
      py::arg("predictions"), py::arg("labels"));
}
