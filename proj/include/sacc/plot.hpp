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

#ifndef SACC_PLOT_HPP_
#define SACC_PLOT_HPP_

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sacc/image.hpp"
#include "sacc/metrics.hpp"

namespace sacc::plot {

struct Series {
  std::string name;
  std::vector<double> xs;
  std::vector<double> ys;
};

/// Records read back from a metrics.jsonl file.
struct MetricsLog {
  Series loss;                   // total loss per step
  std::array<Series, 3> scores;  // NMI, ACC, ARI per evaluation epoch

  bool has_evals() const { return !scores[0].xs.empty(); }
};

MetricsLog read_metrics_log(const std::filesystem::path& path);

/// Line chart with axes, ticks and a legend; empty series are skipped.
Image render_curves(std::span<const Series> series, const std::string& title,
                    const std::string& x_label, Size canvas = {480, 640});

/// Heatmap of row-normalized counts, one `cell` x `cell` block per entry.
Image render_confusion(const metrics::CountMatrix& counts, int cell = 48);

/// One row per input: original | weak | weak | strong.
Image preview_grid(std::span<const std::array<Image, 4>> rows, int padding = 4);

/// 2-D scatter. Points are colored by label when given, grey otherwise.
Image render_scatter(const Eigen::MatrixXd& points, const std::vector<int>* labels,
                     Size canvas = {640, 640});

/// Runs the t-SNE helper script (scikit-learn) on `features`. Returns nullopt
/// when the interpreter or the package is unavailable.
std::optional<Eigen::MatrixXd> tsne(const Eigen::MatrixXd& features, int seed,
                                    const std::filesystem::path& script);

}  // namespace sacc::plot

#endif  // SACC_PLOT_HPP_
