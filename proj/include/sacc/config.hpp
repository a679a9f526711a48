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

#ifndef SACC_CONFIG_HPP_
#define SACC_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "sacc/aug.hpp"
#include "sacc/data.hpp"
#include "sacc/model_config.hpp"

namespace sacc {

/// Training variants. kFull is the three-view objective (also reachable as
/// "both" and "weak_weak_strong"); the others are the ablation rows.
enum class TrainMode {
  kFull,
  kWeakWeak,
  kWeakStrong,
  kInstanceOnly,
  kClusterOnly,
};

std::string mode_name(TrainMode m);
/// Accepts weak_weak, weak_strong, weak_weak_strong, with_instance_only,
/// with_cluster_only, both.
TrainMode parse_mode(const std::string& name);

struct TrainConfig {
  double learning_rate = 3e-4;
  int batch_size = 200;
  int epochs = 1000;
  double tau_g = 0.5;
  double tau_h = 1.0;
  std::string optimizer = "adam";
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double weight_decay = 0.0;
  uint64_t seed = 0;
  int eval_every = 100;
  int checkpoint_every = 0;  // 0: final checkpoint only
  int progress_every = 0;    // steps between stdout progress lines, 0: silent
  int eval_batch_size = 256;
  bool include_self_term = false;
  bool save_embeddings = true;
  TrainMode mode = TrainMode::kFull;

  void validate() const;
};

/// Everything needed to reproduce a run.
struct RunSettings {
  data::DatasetSpec dataset;
  model::ModelConfig model;
  TrainConfig train;
  aug::WeakAugSpec weak;
  aug::StrongAugSpec strong;
  std::filesystem::path output_dir = "runs/sacc";

  void validate() const;
};

/// Parses a TOML run configuration. Unknown keys and ill-typed values raise
/// ConfigError naming the key and its source line.
RunSettings parse_run_config(const std::string& toml_text, const std::string& source = "<config>");

/// Reads `path`, applies dotted-path overrides such as {"train.epochs", "5"},
/// then parses. Relative output_dir values are placed under $SACC_OUTPUT_ROOT
/// when that variable is set.
RunSettings load_run_config(const std::filesystem::path& path,
                            const std::vector<std::pair<std::string, std::string>>& overrides = {});

/// Fully resolved configuration as TOML; parse_run_config(to_toml(s)) == s.
std::string to_toml(const RunSettings& settings);

}  // namespace sacc

#endif  // SACC_CONFIG_HPP_
