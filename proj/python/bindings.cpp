/**
 * Copyright 2026 The SACC Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sacc/aug.hpp"
#include "sacc/config.hpp"
#include "sacc/data.hpp"
#include "sacc/error.hpp"
#include "sacc/loss.hpp"
#include "sacc/metrics.hpp"
#include "sacc/train.hpp"

namespace py = pybind11;
using namespace sacc;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

Image to_image(const FloatArray& a) {
  if (a.ndim() == 2) {
    return Image::from_interleaved(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)), 1,
                                   {a.data(), static_cast<size_t>(a.size())});
  }
  if (a.ndim() != 3 || (a.shape(2) != 1 && a.shape(2) != 3)) {
    throw ConfigError("image must have shape (H, W), (H, W, 1) or (H, W, 3)");
  }
  return Image::from_interleaved(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)),
                                 static_cast<int>(a.shape(2)), {a.data(), static_cast<size_t>(a.size())});
}

py::array_t<float> to_array(const Image& img) {
  py::array_t<float> out({img.height(), img.width(), Image::kChannels});
  std::copy(img.pixels().begin(), img.pixels().end(), out.mutable_data());
  return out;
}

py::dict report_dict(const metrics::EvalReport& r) {
  py::dict d;
  d["nmi"] = r.nmi;
  d["acc"] = r.acc;
  d["ari"] = r.ari;
  d["num_samples"] = r.num_samples;
  d["confusion"] = Eigen::MatrixXd(r.confusion.cast<double>());
  return d;
}

loss::ObjectiveLayout layout_named(const std::string& mode) {
  return train::layout_for(parse_mode(mode));
}

py::dict total_loss(const std::vector<loss::Matrix>& y, const std::vector<loss::Matrix>& c,
                    double tau_g, double tau_h, bool include_self_term, const std::string& mode) {
  loss::LossGradients g;
  loss::LossReport r = loss::total_loss(y, c, {tau_g, include_self_term},
                                        {tau_h, include_self_term}, layout_named(mode), &g);
  py::dict terms;
  for (const auto& t : r.instance_terms) terms[py::str(loss::term_name("instance", t.views))] = t.value;
  for (const auto& t : r.cluster_terms) terms[py::str(loss::term_name("cluster", t.views))] = t.value;
  py::dict d;
  d["total"] = r.total;
  d["terms"] = terms;
  d["grad_y"] = g.y;
  d["grad_c"] = g.c;
  return d;
}

std::vector<std::pair<std::string, std::string>> override_list(
    const std::map<std::string, std::string>& overrides) {
  return {overrides.begin(), overrides.end()};
}

py::dict run_training(const std::filesystem::path& config,
                      const std::map<std::string, std::string>& overrides,
                      const std::optional<std::filesystem::path>& output_dir) {
  RunSettings settings = load_run_config(config, override_list(overrides));
  data::Dataset ds = data::load_dataset(settings.dataset);
  train::TrainOptions opts;
  opts.output_dir = output_dir ? *output_dir : settings.output_dir;
  train::RunRecord record;
  {
    py::gil_scoped_release release;
    record = train::train(settings, ds, opts);
  }
  std::vector<double> totals;
  for (const auto& s : record.steps) totals.push_back(s.loss.total);
  py::list evals;
  for (const auto& e : record.evals) {
    py::dict d = report_dict(e.report);
    d["epoch"] = e.epoch;
    d["step"] = e.step;
    evals.append(d);
  }
  py::dict out;
  out["losses"] = totals;
  out["evals"] = evals;
  out["wall_seconds"] = record.wall_seconds;
  out["output_dir"] = *opts.output_dir;
  return out;
}

py::dict run_evaluation(const std::filesystem::path& checkpoint,
                        const std::optional<std::filesystem::path>& config,
                        const std::map<std::string, std::string>& overrides) {
  RunSettings settings = config ? load_run_config(*config, override_list(overrides))
                                : train::Trainer::load(checkpoint).settings();
  data::Dataset ds = data::load_dataset(settings.dataset);
  return report_dict(train::evaluate(checkpoint, ds));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Contrastive clustering core";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def("instance_pair_loss",
        [](const loss::Matrix& a, const loss::Matrix& b, double tau, bool self) {
          return loss::instance_pair_loss(a, b, {tau, self});
        },
        py::arg("y_a"), py::arg("y_b"), py::arg("tau") = 0.5, py::arg("include_self_term") = false);
  m.def("cluster_pair_loss",
        [](const loss::Matrix& a, const loss::Matrix& b, double tau, bool self) {
          return loss::cluster_pair_loss(a, b, {tau, self});
        },
        py::arg("c_a"), py::arg("c_b"), py::arg("tau") = 1.0, py::arg("include_self_term") = false);
  m.def("total_loss", &total_loss, py::arg("y"), py::arg("c"), py::arg("tau_g") = 0.5,
        py::arg("tau_h") = 1.0, py::arg("include_self_term") = false,
        py::arg("mode") = "weak_weak_strong",
        "Loss terms plus gradients for views indexed 0 (strong), 1, 2 (weak).");

  m.def("accuracy", [](std::vector<int> t, std::vector<int> p) { return metrics::accuracy({t, p}); },
        py::arg("y_true"), py::arg("y_pred"));
  m.def("nmi", [](std::vector<int> t, std::vector<int> p) { return metrics::nmi({t, p}); },
        py::arg("y_true"), py::arg("y_pred"));
  m.def("ari", [](std::vector<int> t, std::vector<int> p) { return metrics::ari({t, p}); },
        py::arg("y_true"), py::arg("y_pred"));
  m.def("evaluate_labels",
        [](std::vector<int> t, std::vector<int> p) { return report_dict(metrics::evaluate_labels({t, p})); },
        py::arg("y_true"), py::arg("y_pred"));

  m.def("sample_views",
        [](const FloatArray& img, uint64_t seed, std::pair<int, int> size) {
          aug::Rng rng(seed);
          aug::ViewTriple t = aug::sample_views(to_image(img), {}, {}, rng, {size.first, size.second});
          return py::make_tuple(to_array(t.strong), to_array(t.weak_a), to_array(t.weak_b));
        },
        py::arg("image"), py::arg("seed") = 0, py::arg("size") = std::pair<int, int>{224, 224},
        "(strong, weak_a, weak_b) views of an (H, W, 3) float image in [0, 1].");
  m.def("strong_ops", [] {
    std::vector<std::string> names;
    for (aug::StrongOp op : aug::all_strong_ops()) names.emplace_back(aug::op_name(op));
    return names;
  });

  m.def("make_synthetic",
        [](int num_classes, int per_class, std::pair<int, int> size, double separation, double noise,
           uint64_t seed) {
          data::SyntheticSpec spec;
          spec.num_classes = num_classes;
          spec.per_class = per_class;
          spec.image_size = {size.first, size.second};
          spec.class_separation = separation;
          spec.noise_sigma = noise;
          spec.rng_seed = seed;
          data::Dataset ds = data::make_synthetic(spec);
          py::array_t<float> images({static_cast<py::ssize_t>(ds.size()),
                                     static_cast<py::ssize_t>(size.first),
                                     static_cast<py::ssize_t>(size.second),
                                     static_cast<py::ssize_t>(Image::kChannels)});
          float* dst = images.mutable_data();
          for (const Image& img : ds.images) dst = std::copy(img.pixels().begin(), img.pixels().end(), dst);
          return py::make_tuple(images, ds.labels->labels);
        },
        py::arg("num_classes") = 4, py::arg("per_class") = 64,
        py::arg("size") = std::pair<int, int>{32, 32}, py::arg("separation") = 3.0,
        py::arg("noise") = 0.05, py::arg("seed") = 0);

  m.def("resolved_config",
        [](const std::filesystem::path& path, const std::map<std::string, std::string>& overrides) {
          return to_toml(load_run_config(path, override_list(overrides)));
        },
        py::arg("path"), py::arg("overrides") = std::map<std::string, std::string>{});
  m.def("train", &run_training, py::arg("config"),
        py::arg("overrides") = std::map<std::string, std::string>{},
        py::arg("output_dir") = std::nullopt);
  m.def("evaluate", &run_evaluation, py::arg("checkpoint"), py::arg("config") = std::nullopt,
        py::arg("overrides") = std::map<std::string, std::string>{});
}
