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

#ifndef SACC_LOSS_HPP_
#define SACC_LOSS_HPP_

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sacc::loss {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct InstanceLossConfig {
  double tau = 0.5;
  // Keep exp(s(y_i, y_i) / tau) in the same-view part of the denominator.
  bool include_self_term = false;

  void validate() const;
};

struct ClusterLossConfig {
  double tau = 1.0;
  bool include_self_term = false;
  // Allowed deviation of a row sum from 1 (and of entries below 0).
  double simplex_tolerance = 1e-4;

  void validate() const;
};

/// u.v / (|u| |v|). Throws NumericalError on a zero-norm argument.
double cosine_sim(const Vector& u, const Vector& v);

struct PairGradient {
  double value = 0.0;
  Matrix grad_a;
  Matrix grad_b;
};

/// Symmetric normalized temperature-scaled cross entropy between two sets of
/// K vectors stored as rows. Row i of `a` and row i of `b` form the positive
/// pair; the other 2K - 2 similarities of each anchor act as negatives.
/// Returns the mean over all 2K anchors.
double nt_xent(const Matrix& a, const Matrix& b, double tau, bool include_self_term);
PairGradient nt_xent_with_grad(const Matrix& a, const Matrix& b, double tau,
                               bool include_self_term);

/// Instance-level contrast between two views (rows are samples).
/// Requires N >= 2 and no zero rows.
double instance_pair_loss(const Matrix& y_a, const Matrix& y_b, const InstanceLossConfig& cfg);
PairGradient instance_pair_loss_with_grad(const Matrix& y_a, const Matrix& y_b,
                                          const InstanceLossConfig& cfg);

/// Strong-weak pair (1, 2) plus weak-weak pair (2, 3).
double instance_loss(const Matrix& y1, const Matrix& y2, const Matrix& y3,
                     const InstanceLossConfig& cfg);

/// Entropy of the cluster marginal P_m = colsum_m / sum(c) of one view.
double assignment_entropy(const Matrix& c);

struct ClusterPairTerms {
  double contrastive = 0.0;  // column-space NT-Xent
  double entropy = 0.0;      // H(Y), summed over both views

  double value() const { return contrastive - entropy; }
};

/// Cluster-level contrast between the columns of two N x M assignment
/// matrices, minus the assignment entropy of both views.
ClusterPairTerms cluster_pair_terms(const Matrix& c_a, const Matrix& c_b,
                                    const ClusterLossConfig& cfg);
double cluster_pair_loss(const Matrix& c_a, const Matrix& c_b, const ClusterLossConfig& cfg);
PairGradient cluster_pair_loss_with_grad(const Matrix& c_a, const Matrix& c_b,
                                         const ClusterLossConfig& cfg);

/// All three view pairs (1, 2), (1, 3), (2, 3).
double cluster_loss(const Matrix& c1, const Matrix& c2, const Matrix& c3,
                    const ClusterLossConfig& cfg);

/// 1-based view numbers; view 1 is the strong view.
struct ViewPair {
  int a = 1;
  int b = 2;
  bool operator==(const ViewPair&) const = default;
};

/// Which view pairs enter each level of the objective.
struct ObjectiveLayout {
  std::vector<ViewPair> instance_pairs;
  std::vector<ViewPair> cluster_pairs;

  static ObjectiveLayout full();
  std::vector<int> views_used() const;
};

struct PairTerm {
  ViewPair views;
  double value = 0.0;    // includes -H(Y) for cluster terms
  double entropy = 0.0;  // H(Y) for cluster terms, 0 for instance terms
};

struct LossReport {
  double total = 0.0;
  std::vector<PairTerm> instance_terms;
  std::vector<PairTerm> cluster_terms;

  double instance_total() const;
  double cluster_total() const;
};

std::string term_name(const char* level, ViewPair pair);

/// Gradients of the total with respect to each view's y and c, indexed by
/// view number - 1. Unused views keep empty matrices.
struct LossGradients {
  std::vector<Matrix> y;
  std::vector<Matrix> c;
};

/// L = sum of cluster terms + sum of instance terms over the layout.
/// `y` and `c` are indexed by view number - 1; views not referenced by the
/// layout may be empty. Gradients are written when `grads` is non-null.
LossReport total_loss(std::span<const Matrix> y, std::span<const Matrix> c,
                      const InstanceLossConfig& instance_cfg,
                      const ClusterLossConfig& cluster_cfg,
                      const ObjectiveLayout& layout = ObjectiveLayout::full(),
                      LossGradients* grads = nullptr);

}  // namespace sacc::loss

#endif  // SACC_LOSS_HPP_
