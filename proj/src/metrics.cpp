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

#include "sacc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "sacc/error.hpp"

namespace sacc::metrics {
namespace {

double entropy_of_counts(const Eigen::Matrix<int64_t, Eigen::Dynamic, 1>& counts, double n) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < counts.size(); ++i) {
    if (counts(i) > 0) {
      double p = static_cast<double>(counts(i)) / n;
      h -= p * std::log(p);
    }
  }
  return h;
}

double comb2(int64_t n) { return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1); }

// Two partitions are identical up to relabeling iff the contingency table has
// exactly one non-zero entry in every non-empty row and column.
bool same_partition(const CountMatrix& table) {
  for (Eigen::Index r = 0; r < table.rows(); ++r) {
    if ((table.row(r).array() > 0).count() > 1) return false;
  }
  for (Eigen::Index c = 0; c < table.cols(); ++c) {
    if ((table.col(c).array() > 0).count() > 1) return false;
  }
  return true;
}

}  // namespace

void LabelPair::validate() const {
  if (y_true.size() != y_pred.size()) {
    throw ConfigError("label length mismatch: " + std::to_string(y_true.size()) + " true vs " +
                      std::to_string(y_pred.size()) + " predicted");
  }
  if (y_true.empty()) throw ConfigError("label vectors must not be empty");
  auto negative = [](int v) { return v < 0; };
  if (std::any_of(y_true.begin(), y_true.end(), negative) ||
      std::any_of(y_pred.begin(), y_pred.end(), negative)) {
    throw ConfigError("labels must be non-negative");
  }
}

CountMatrix contingency(const LabelPair& pair) {
  pair.validate();
  const int kt = *std::max_element(pair.y_true.begin(), pair.y_true.end()) + 1;
  const int kp = *std::max_element(pair.y_pred.begin(), pair.y_pred.end()) + 1;
  CountMatrix table = CountMatrix::Zero(kt, kp);
  for (size_t i = 0; i < pair.y_true.size(); ++i) ++table(pair.y_true[i], pair.y_pred[i]);
  return table;
}

std::vector<int> hungarian_min_cost(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw ConfigError("hungarian_min_cost expects a square matrix");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based potentials formulation; way[j] tracks the augmenting path.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = match[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (match[j] != 0) row_to_col[match[j] - 1] = j - 1;
  }
  return row_to_col;
}

std::vector<int> optimal_assignment(const CountMatrix& table) {
  const auto kt = table.rows();
  const auto kp = table.cols();
  const auto s = std::max(kt, kp);
  // Pad to square with zero rows/columns, then maximize matched counts.
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(s, s);
  cost.topLeftCorner(kt, kp) = -table.cast<double>();
  std::vector<int> class_to_cluster = hungarian_min_cost(cost);
  std::vector<int> cluster_to_class(kp, -1);
  for (Eigen::Index k = 0; k < kt; ++k) {
    int m = class_to_cluster[k];
    if (m < kp) cluster_to_class[m] = static_cast<int>(k);
  }
  return cluster_to_class;
}

double accuracy(const LabelPair& pair) {
  CountMatrix table = contingency(pair);
  std::vector<int> map = optimal_assignment(table);
  int64_t matched = 0;
  for (size_t m = 0; m < map.size(); ++m) {
    if (map[m] >= 0) matched += table(map[m], static_cast<Eigen::Index>(m));
  }
  return static_cast<double>(matched) / static_cast<double>(pair.y_true.size());
}

double nmi(const LabelPair& pair) {
  CountMatrix table = contingency(pair);
  const double n = static_cast<double>(pair.y_true.size());
  Eigen::Matrix<int64_t, Eigen::Dynamic, 1> rows = table.rowwise().sum();
  Eigen::Matrix<int64_t, Eigen::Dynamic, 1> cols = table.colwise().sum().transpose();
  const double hu = entropy_of_counts(rows, n);
  const double hv = entropy_of_counts(cols, n);
  if (hu == 0.0 || hv == 0.0) return same_partition(table) ? 1.0 : 0.0;
  double mi = 0.0;
  for (Eigen::Index k = 0; k < table.rows(); ++k) {
    for (Eigen::Index m = 0; m < table.cols(); ++m) {
      if (table(k, m) == 0) continue;
      double nkm = static_cast<double>(table(k, m));
      mi += nkm / n * std::log(n * nkm / (static_cast<double>(rows(k)) * cols(m)));
    }
  }
  return std::clamp(mi / std::sqrt(hu * hv), 0.0, 1.0);
}

double ari(const LabelPair& pair) {
  CountMatrix table = contingency(pair);
  const auto n = static_cast<int64_t>(pair.y_true.size());
  if (n < 2) throw ConfigError("ari needs at least two samples");
  double index = 0.0;
  for (Eigen::Index k = 0; k < table.rows(); ++k) {
    for (Eigen::Index m = 0; m < table.cols(); ++m) index += comb2(table(k, m));
  }
  double sum_rows = 0.0;
  double sum_cols = 0.0;
  for (Eigen::Index k = 0; k < table.rows(); ++k) sum_rows += comb2(table.row(k).sum());
  for (Eigen::Index m = 0; m < table.cols(); ++m) sum_cols += comb2(table.col(m).sum());
  // Scaled by C(n, 2) so every operand stays an exact integer.
  const double pairs = comb2(n);
  const double numerator = index * pairs - sum_rows * sum_cols;
  const double denominator = 0.5 * (sum_rows + sum_cols) * pairs - sum_rows * sum_cols;
  if (denominator == 0.0) return 1.0;
  return numerator / denominator;
}

ConfusionMatrix confusion_matrix(const LabelPair& pair) {
  ConfusionMatrix out;
  out.counts = contingency(pair);
  const auto kt = out.counts.rows();
  const auto kp = out.counts.cols();
  const auto s = std::max(kt, kp);
  CountMatrix padded = CountMatrix::Zero(s, s);
  padded.topLeftCorner(kt, kp) = out.counts;
  Eigen::MatrixXd cost = -padded.cast<double>();
  std::vector<int> class_to_cluster = hungarian_min_cost(cost);
  out.display = CountMatrix::Zero(s, s);
  out.column_clusters.resize(s);
  for (Eigen::Index j = 0; j < s; ++j) {
    const int m = class_to_cluster[j];
    out.column_clusters[j] = m < kp ? m : -1;
    out.display.col(j) = padded.col(m);
  }
  return out;
}

EvalReport evaluate_labels(const LabelPair& pair) {
  EvalReport r;
  r.num_samples = static_cast<int64_t>(pair.y_true.size());
  r.acc = accuracy(pair);
  r.nmi = nmi(pair);
  r.ari = pair.y_true.size() >= 2 ? ari(pair) : 1.0;
  r.confusion = confusion_matrix(pair).display;
  r.assignment = optimal_assignment(contingency(pair));
  return r;
}

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json confusion = nlohmann::json::array();
  for (Eigen::Index r = 0; r < report.confusion.rows(); ++r) {
    std::vector<int64_t> row(report.confusion.cols());
    for (Eigen::Index c = 0; c < report.confusion.cols(); ++c) row[c] = report.confusion(r, c);
    confusion.push_back(row);
  }
  return {{"nmi", report.nmi},
          {"acc", report.acc},
          {"ari", report.ari},
          {"num_samples", report.num_samples},
          {"confusion", confusion},
          {"assignment", report.assignment}};
}

EvalReport eval_report_from_json(const nlohmann::json& j) {
  EvalReport r;
  r.nmi = j.at("nmi").get<double>();
  r.acc = j.at("acc").get<double>();
  r.ari = j.at("ari").get<double>();
  r.num_samples = j.at("num_samples").get<int64_t>();
  r.assignment = j.at("assignment").get<std::vector<int>>();
  const auto& rows = j.at("confusion");
  const auto n_rows = static_cast<Eigen::Index>(rows.size());
  const auto n_cols = n_rows == 0 ? 0 : static_cast<Eigen::Index>(rows[0].size());
  r.confusion = CountMatrix::Zero(n_rows, n_cols);
  for (Eigen::Index i = 0; i < n_rows; ++i) {
    for (Eigen::Index k = 0; k < n_cols; ++k) r.confusion(i, k) = rows[i][k].get<int64_t>();
  }
  return r;
}

std::string csv_header() { return "tag,num_samples,nmi,acc,ari"; }

std::string csv_row(const std::string& tag, const EvalReport& report) {
  std::ostringstream os;
  os << tag << ',' << report.num_samples << std::setprecision(17) << ',' << report.nmi << ','
     << report.acc << ',' << report.ari;
  return os.str();
}

}  // namespace sacc::metrics
