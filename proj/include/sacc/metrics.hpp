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

#ifndef SACC_METRICS_HPP_
#define SACC_METRICS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

namespace sacc::metrics {

using CountMatrix = Eigen::Matrix<int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Ground-truth classes next to predicted clusters. Labels are non-negative
/// and need not be contiguous.
struct LabelPair {
  std::vector<int> y_true;
  std::vector<int> y_pred;

  void validate() const;
};

/// Entry (k, m) counts samples with class k and cluster m.
CountMatrix contingency(const LabelPair& pair);

/// Minimum-cost perfect matching on a square cost matrix (Kuhn-Munkres with
/// potentials). Returns, for every row, the matched column.
std::vector<int> hungarian_min_cost(const Eigen::MatrixXd& cost);

/// Cluster -> class map maximizing matched samples. Entry m is the class of
/// predicted cluster m, or -1 when the cluster is left unmatched.
std::vector<int> optimal_assignment(const CountMatrix& table);

double accuracy(const LabelPair& pair);

/// I(U;V) / sqrt(H(U) H(V)). When either side has zero entropy the score is
/// 1 for identical partitions and 0 otherwise.
double nmi(const LabelPair& pair);

/// Adjusted Rand index under the permutation model. Requires N >= 2.
double ari(const LabelPair& pair);

struct ConfusionMatrix {
  CountMatrix counts;   // classes x clusters, raw cluster order
  CountMatrix display;  // square, column k holds the cluster matched to class k
  std::vector<int> column_clusters;  // cluster id shown in each display column
};

ConfusionMatrix confusion_matrix(const LabelPair& pair);

struct EvalReport {
  double nmi = 0.0;
  double acc = 0.0;
  double ari = 0.0;
  int64_t num_samples = 0;
  CountMatrix confusion;        // display order
  std::vector<int> assignment;  // cluster -> class, -1 if unmatched
};

EvalReport evaluate_labels(const LabelPair& pair);

nlohmann::json to_json(const EvalReport& report);
EvalReport eval_report_from_json(const nlohmann::json& j);

std::string csv_header();
std::string csv_row(const std::string& tag, const EvalReport& report);

}  // namespace sacc::metrics

#endif  // SACC_METRICS_HPP_
