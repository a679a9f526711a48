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

#ifndef SACC_MODEL_CONFIG_HPP_
#define SACC_MODEL_CONFIG_HPP_

#include <string>

namespace sacc::model {

enum class Architecture { kResNet34, kSmallConv };

std::string architecture_name(Architecture a);
Architecture parse_architecture(const std::string& name);

struct BackboneConfig {
  Architecture architecture = Architecture::kResNet34;
  // Feature width D. ResNet-34 is fixed at 512; small_conv uses
  // D/8, D/4, D/2, D channels in its four blocks.
  int output_dim = 512;
};

struct InstanceHeadConfig {
  int hidden_dim = 0;  // 0: same as the backbone output
  int out_dim = 128;
};

struct ClusterHeadConfig {
  int hidden_dim = 0;  // 0: same as the backbone output
  int num_clusters = 10;  // run configs may leave this 0 to follow the dataset
};

struct ModelConfig {
  BackboneConfig backbone;
  InstanceHeadConfig instance;
  ClusterHeadConfig cluster;

  void validate() const;
};

}  // namespace sacc::model

#endif  // SACC_MODEL_CONFIG_HPP_
