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

#include "sacc/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sacc/error.hpp"

namespace sacc::loss {
namespace {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw NumericalError(std::string(what) + " contains NaN or Inf");
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw NumericalError(std::string(what) + ": view shapes differ (" +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                         std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + ")");
  }
}

// Row norms; throws on any zero row.
Vector row_norms(const Matrix& m, const char* what) {
  Vector n = m.rowwise().norm();
  for (Eigen::Index i = 0; i < n.size(); ++i) {
    if (!(n(i) > 0.0)) {
      throw NumericalError(std::string(what) + ": vector " + std::to_string(i) +
                           " has zero norm, similarity undefined");
    }
  }
  return n;
}

// Log-sum-exp of each row of [same | cross], masking the diagonal of `same`
// unless include_self is set. Returns the per-row lse.
Vector row_lse(const Matrix& same, const Matrix& cross, bool include_self) {
  const Eigen::Index k = same.rows();
  Vector lse(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    double mx = cross.row(i).maxCoeff();
    for (Eigen::Index j = 0; j < k; ++j) {
      if (j != i || include_self) mx = std::max(mx, same(i, j));
    }
    double acc = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (j != i || include_self) acc += std::exp(same(i, j) - mx);
      acc += std::exp(cross(i, j) - mx);
    }
    lse(i) = mx + std::log(acc);
  }
  return lse;
}

void check_simplex_rows(const Matrix& c, double tol, const char* what) {
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    double s = c.row(i).sum();
    if (std::abs(s - 1.0) > tol || c.row(i).minCoeff() < -tol) {
      throw NumericalError(std::string(what) + ": row " + std::to_string(i) +
                           " is off the probability simplex (sum " + std::to_string(s) + ")");
    }
  }
}

double neg_entropy(const Vector& p) {
  double acc = 0.0;
  for (Eigen::Index m = 0; m < p.size(); ++m) {
    if (p(m) > 0.0) acc += p(m) * std::log(p(m));
  }
  return acc;
}

Vector marginal(const Matrix& c) {
  const double total = c.sum();
  if (!(total > 0.0)) throw NumericalError("cluster assignment matrix sums to zero");
  return c.colwise().sum().transpose() / total;
}

// d(sum_m P_m log P_m) / dc for P = colsum / sum(c).
Matrix neg_entropy_grad(const Matrix& c) {
  const double total = c.sum();
  Vector p = marginal(c);
  const double h = neg_entropy(p);
  Eigen::RowVectorXd per_col(p.size());
  for (Eigen::Index m = 0; m < p.size(); ++m) {
    if (!(p(m) > 0.0)) throw NumericalError("entropy gradient undefined for an empty cluster");
    per_col(m) = (std::log(p(m)) - h) / total;
  }
  return per_col.replicate(c.rows(), 1);
}

void validate_cluster_inputs(const Matrix& c_a, const Matrix& c_b, const ClusterLossConfig& cfg) {
  cfg.validate();
  require_same_shape(c_a, c_b, "cluster_pair_loss");
  require_finite(c_a, "cluster_pair_loss: view a");
  require_finite(c_b, "cluster_pair_loss: view b");
  if (c_a.cols() < 2) throw NumericalError("cluster_pair_loss needs M >= 2 clusters");
  check_simplex_rows(c_a, cfg.simplex_tolerance, "cluster_pair_loss: view a");
  check_simplex_rows(c_b, cfg.simplex_tolerance, "cluster_pair_loss: view b");
}

void validate_instance_inputs(const Matrix& y_a, const Matrix& y_b, const InstanceLossConfig& cfg) {
  cfg.validate();
  require_same_shape(y_a, y_b, "instance_pair_loss");
  require_finite(y_a, "instance_pair_loss: view a");
  require_finite(y_b, "instance_pair_loss: view b");
  if (y_a.rows() < 2) throw NumericalError("instance_pair_loss needs N >= 2 samples");
}

const Matrix& view_at(std::span<const Matrix> views, int number, const char* what) {
  if (number < 1 || static_cast<size_t>(number) > views.size()) {
    throw ConfigError(std::string(what) + ": view " + std::to_string(number) + " not provided");
  }
  return views[number - 1];
}

}  // namespace

void InstanceLossConfig::validate() const {
  if (!(std::isfinite(tau) && tau > 0.0)) throw ConfigError("tau_g must be finite and positive");
}

void ClusterLossConfig::validate() const {
  if (!(std::isfinite(tau) && tau > 0.0)) throw ConfigError("tau_h must be finite and positive");
  if (!(simplex_tolerance >= 0.0)) throw ConfigError("simplex_tolerance must be >= 0");
}

double cosine_sim(const Vector& u, const Vector& v) {
  if (u.size() != v.size()) throw NumericalError("cosine_sim: dimension mismatch");
  const double nu = u.norm();
  const double nv = v.norm();
  if (!(nu > 0.0) || !(nv > 0.0)) {
    throw NumericalError("cosine_sim: zero-norm vector, similarity undefined");
  }
  return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

PairGradient nt_xent_with_grad(const Matrix& a, const Matrix& b, double tau,
                               bool include_self_term) {
  require_same_shape(a, b, "nt_xent");
  const Eigen::Index k = a.rows();
  if (k < 2) throw NumericalError("nt_xent needs at least two vectors per view");

  const Vector na = row_norms(a, "nt_xent view a");
  const Vector nb = row_norms(b, "nt_xent view b");
  const Matrix ua = na.cwiseInverse().asDiagonal() * a;
  const Matrix ub = nb.cwiseInverse().asDiagonal() * b;

  const Matrix s_aa = ua * ua.transpose() / tau;
  const Matrix s_ab = ua * ub.transpose() / tau;
  const Matrix s_bb = ub * ub.transpose() / tau;
  const Matrix s_ba = s_ab.transpose();

  const Vector lse_a = row_lse(s_aa, s_ab, include_self_term);
  const Vector lse_b = row_lse(s_bb, s_ba, include_self_term);

  PairGradient out;
  out.value = (lse_a.sum() + lse_b.sum() - 2.0 * s_ab.diagonal().sum()) / (2.0 * k);

  // Softmax weights of each logit, scaled by d(mean)/d(anchor loss).
  const double scale = 1.0 / (2.0 * k);
  Matrix g_aa = (s_aa.colwise() - lse_a).array().exp().matrix() * scale;
  Matrix g_bb = (s_bb.colwise() - lse_b).array().exp().matrix() * scale;
  if (!include_self_term) {
    g_aa.diagonal().setZero();
    g_bb.diagonal().setZero();
  }
  Matrix p_ab = (s_ab.colwise() - lse_a).array().exp().matrix();
  Matrix p_ba = (s_ba.colwise() - lse_b).array().exp().matrix();
  Matrix g_ab = (p_ab + p_ba.transpose()) * scale;
  g_ab.diagonal().array() -= 2.0 * scale;

  Matrix d_ua = ((g_aa + g_aa.transpose()) * ua + g_ab * ub) / tau;
  Matrix d_ub = ((g_bb + g_bb.transpose()) * ub + g_ab.transpose() * ua) / tau;

  // Back through u / |u|: (I - u u^T) d / |u|.
  auto unnormalize = [](const Matrix& d_unit, const Matrix& unit, const Vector& norms) {
    Vector radial = (d_unit.cwiseProduct(unit)).rowwise().sum();
    Matrix tangential = d_unit - radial.asDiagonal() * unit;
    return Matrix(norms.cwiseInverse().asDiagonal() * tangential);
  };
  out.grad_a = unnormalize(d_ua, ua, na);
  out.grad_b = unnormalize(d_ub, ub, nb);
  return out;
}

double nt_xent(const Matrix& a, const Matrix& b, double tau, bool include_self_term) {
  return nt_xent_with_grad(a, b, tau, include_self_term).value;
}

PairGradient instance_pair_loss_with_grad(const Matrix& y_a, const Matrix& y_b,
                                          const InstanceLossConfig& cfg) {
  validate_instance_inputs(y_a, y_b, cfg);
  return nt_xent_with_grad(y_a, y_b, cfg.tau, cfg.include_self_term);
}

double instance_pair_loss(const Matrix& y_a, const Matrix& y_b, const InstanceLossConfig& cfg) {
  return instance_pair_loss_with_grad(y_a, y_b, cfg).value;
}

double instance_loss(const Matrix& y1, const Matrix& y2, const Matrix& y3,
                     const InstanceLossConfig& cfg) {
  return instance_pair_loss(y1, y2, cfg) + instance_pair_loss(y2, y3, cfg);
}

double assignment_entropy(const Matrix& c) { return -neg_entropy(marginal(c)); }

ClusterPairTerms cluster_pair_terms(const Matrix& c_a, const Matrix& c_b,
                                    const ClusterLossConfig& cfg) {
  validate_cluster_inputs(c_a, c_b, cfg);
  ClusterPairTerms terms;
  terms.contrastive =
      nt_xent(c_a.transpose(), c_b.transpose(), cfg.tau, cfg.include_self_term);
  terms.entropy = assignment_entropy(c_a) + assignment_entropy(c_b);
  return terms;
}

double cluster_pair_loss(const Matrix& c_a, const Matrix& c_b, const ClusterLossConfig& cfg) {
  return cluster_pair_terms(c_a, c_b, cfg).value();
}

PairGradient cluster_pair_loss_with_grad(const Matrix& c_a, const Matrix& c_b,
                                         const ClusterLossConfig& cfg) {
  validate_cluster_inputs(c_a, c_b, cfg);
  PairGradient col =
      nt_xent_with_grad(c_a.transpose(), c_b.transpose(), cfg.tau, cfg.include_self_term);
  PairGradient out;
  out.value = col.value - (assignment_entropy(c_a) + assignment_entropy(c_b));
  out.grad_a = col.grad_a.transpose() + neg_entropy_grad(c_a);
  out.grad_b = col.grad_b.transpose() + neg_entropy_grad(c_b);
  return out;
}

double cluster_loss(const Matrix& c1, const Matrix& c2, const Matrix& c3,
                    const ClusterLossConfig& cfg) {
  return cluster_pair_loss(c1, c2, cfg) + cluster_pair_loss(c1, c3, cfg) +
         cluster_pair_loss(c2, c3, cfg);
}

ObjectiveLayout ObjectiveLayout::full() {
  return ObjectiveLayout{{{1, 2}, {2, 3}}, {{1, 2}, {1, 3}, {2, 3}}};
}

std::vector<int> ObjectiveLayout::views_used() const {
  std::vector<int> views;
  for (const auto* pairs : {&instance_pairs, &cluster_pairs}) {
    for (const ViewPair& p : *pairs) {
      views.push_back(p.a);
      views.push_back(p.b);
    }
  }
  std::sort(views.begin(), views.end());
  views.erase(std::unique(views.begin(), views.end()), views.end());
  return views;
}

double LossReport::instance_total() const {
  double acc = 0.0;
  for (const auto& t : instance_terms) acc += t.value;
  return acc;
}

double LossReport::cluster_total() const {
  double acc = 0.0;
  for (const auto& t : cluster_terms) acc += t.value;
  return acc;
}

std::string term_name(const char* level, ViewPair pair) {
  return std::string(level) + "_" + std::to_string(pair.a) + std::to_string(pair.b);
}

LossReport total_loss(std::span<const Matrix> y, std::span<const Matrix> c,
                      const InstanceLossConfig& instance_cfg,
                      const ClusterLossConfig& cluster_cfg, const ObjectiveLayout& layout,
                      LossGradients* grads) {
  if (grads != nullptr) {
    grads->y.assign(y.size(), Matrix());
    grads->c.assign(c.size(), Matrix());
  }
  auto accumulate = [](std::vector<Matrix>& slots, int view, const Matrix& g) {
    Matrix& slot = slots[view - 1];
    if (slot.size() == 0) {
      slot = g;
    } else {
      slot += g;
    }
  };

  LossReport report;
  for (const ViewPair& p : layout.instance_pairs) {
    const Matrix& ya = view_at(y, p.a, "total_loss instance");
    const Matrix& yb = view_at(y, p.b, "total_loss instance");
    PairGradient g = instance_pair_loss_with_grad(ya, yb, instance_cfg);
    report.instance_terms.push_back({p, g.value, 0.0});
    if (grads != nullptr) {
      accumulate(grads->y, p.a, g.grad_a);
      accumulate(grads->y, p.b, g.grad_b);
    }
  }
  for (const ViewPair& p : layout.cluster_pairs) {
    const Matrix& ca = view_at(c, p.a, "total_loss cluster");
    const Matrix& cb = view_at(c, p.b, "total_loss cluster");
    PairGradient g = cluster_pair_loss_with_grad(ca, cb, cluster_cfg);
    double h = assignment_entropy(ca) + assignment_entropy(cb);
    report.cluster_terms.push_back({p, g.value, h});
    if (grads != nullptr) {
      accumulate(grads->c, p.a, g.grad_a);
      accumulate(grads->c, p.b, g.grad_b);
    }
  }
  report.total = report.instance_total() + report.cluster_total();
  if (!std::isfinite(report.total)) throw NumericalError("total loss is not finite");
  return report;
}

}  // namespace sacc::loss
