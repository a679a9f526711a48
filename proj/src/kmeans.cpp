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

#include "sacc/kmeans.hpp"

#include <limits>
#include <random>

#include "sacc/error.hpp"

namespace sacc {
namespace {

Eigen::MatrixXd seed_plus_plus(const Eigen::MatrixXd& x, int k, std::mt19937_64& rng) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd centers(k, x.cols());
  centers.row(0) = x.row(std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng));
  Eigen::VectorXd d2 = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double r = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (pick = 0; pick < n - 1; ++pick) {
        r -= d2(pick);
        if (r <= 0.0) break;
      }
    } else {
      pick = std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng);
    }
    centers.row(c) = x.row(pick);
    d2 = d2.cwiseMin((x.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

KMeansResult lloyd(const Eigen::MatrixXd& x, Eigen::MatrixXd centers, int max_iter) {
  const Eigen::Index n = x.rows();
  const int k = static_cast<int>(centers.rows());
  KMeansResult res;
  res.labels.assign(n, -1);
  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    res.inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best;
      double d = (centers.rowwise() - x.row(i)).rowwise().squaredNorm().minCoeff(&best);
      res.inertia += d;
      if (res.labels[i] != static_cast<int>(best)) {
        res.labels[i] = static_cast<int>(best);
        changed = true;
      }
    }
    if (!changed) break;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(res.labels[i]) += x.row(i);
      ++counts(res.labels[i]);
    }
    for (int c = 0; c < k; ++c) {
      // Empty clusters keep their previous center.
      if (counts(c) > 0) centers.row(c) = sums.row(c) / counts(c);
    }
  }
  res.centroids = std::move(centers);
  return res;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, uint64_t seed, int restarts,
                    int max_iter) {
  if (k < 1 || points.rows() < k) {
    throw ConfigError("kmeans needs 1 <= k <= number of points");
  }
  if (!points.allFinite()) throw NumericalError("kmeans input contains NaN or Inf");
  std::mt19937_64 rng(seed);
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, restarts); ++r) {
    KMeansResult run = lloyd(points, seed_plus_plus(points, k, rng), max_iter);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return best;
}

}  // namespace sacc
