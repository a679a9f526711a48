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

#ifndef SACC_MODEL_HPP_
#define SACC_MODEL_HPP_

#include <span>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "sacc/image.hpp"
#include "sacc/model_config.hpp"

namespace sacc::model {

/// Outputs of the shared network for one view. Rows of `c` lie on the
/// probability simplex.
struct Embeddings {
  torch::Tensor z;
  torch::Tensor y;
  torch::Tensor c;
  int view_index = 0;
};

/// Backbone plus the instance and cluster projectors. One parameter set
/// serves every view.
class SaccNetImpl : public torch::nn::Module {
 public:
  explicit SaccNetImpl(const ModelConfig& cfg);

  Embeddings forward(const torch::Tensor& images);

  const ModelConfig& config() const { return cfg_; }
  torch::nn::Sequential& backbone() { return backbone_; }

 private:
  ModelConfig cfg_;
  torch::nn::Sequential backbone_{nullptr};
  torch::nn::Sequential instance_head_{nullptr};
  torch::nn::Sequential cluster_head_{nullptr};
};
TORCH_MODULE(SaccNet);

/// NCHW float tensor from HWC images of equal size.
torch::Tensor images_to_tensor(std::span<const Image> images);

/// Runs each defined view tensor through the same network. Undefined
/// entries (views not used by an objective) produce empty Embeddings.
std::vector<Embeddings> forward_views(SaccNet& net, std::span<const torch::Tensor> views);

/// Row-wise argmax; ties resolve to the lowest index.
std::vector<int> argmax_rows(const torch::Tensor& probabilities);

/// Cluster labels of un-augmented images, computed in eval mode.
std::vector<int> predict_clusters(SaccNet& net, std::span<const Image> images,
                                  int batch_size = 256);

/// Instance-projector features of un-augmented images (N x out_dim, eval mode).
torch::Tensor instance_features(SaccNet& net, std::span<const Image> images,
                                int batch_size = 256);

}  // namespace sacc::model

#endif  // SACC_MODEL_HPP_
