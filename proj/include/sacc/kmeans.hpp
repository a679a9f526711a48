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

#ifndef SACC_KMEANS_HPP_
#define SACC_KMEANS_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace sacc {

struct KMeansResult {
  std::vector<int> labels;
  Eigen::MatrixXd centroids;  // k x d
  double inertia = 0.0;
};

/// Lloyd iterations from k-means++ seeds; the best of `restarts` runs by
/// inertia is returned. Rows of `points` are samples.
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, uint64_t seed, int restarts = 10,
                    int max_iter = 300);

}  // namespace sacc

#endif  // SACC_KMEANS_HPP_
