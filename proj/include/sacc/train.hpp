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

#ifndef SACC_TRAIN_HPP_
#define SACC_TRAIN_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "json.hpp"
#include "sacc/aug.hpp"
#include "sacc/config.hpp"
#include "sacc/data.hpp"
#include "sacc/loss.hpp"
#include "sacc/metrics.hpp"
#include "sacc/model.hpp"

namespace sacc::train {

inline constexpr const char* kCheckpointFormat = "sacc-checkpoint-v1";

/// View pairs entering each loss level for a training mode.
loss::ObjectiveLayout layout_for(TrainMode mode);

struct StepRecord {
  int epoch = 0;  // 1-based epoch the step belongs to
  int64_t step = 0;
  loss::LossReport loss;
};

struct EvalRecord {
  int epoch = 0;  // completed epochs at evaluation time
  int64_t step = 0;
  metrics::EvalReport report;
};

struct RunRecord {
  std::vector<StepRecord> steps;
  std::vector<EvalRecord> evals;
  double wall_seconds = 0.0;
  std::string config_toml;
};

nlohmann::json to_json(const StepRecord& r);
nlohmann::json to_json(const EvalRecord& r);

/// Owns the network, optimizer and augmentation stream of one run. Training
/// consumes images only; labels enter through evaluate().
class Trainer {
 public:
  /// `settings.model.cluster.num_clusters` must be resolved (non-zero).
  explicit Trainer(RunSettings settings);
  ~Trainer();
  Trainer(Trainer&&) noexcept;
  Trainer& operator=(Trainer&&) noexcept;

  static Trainer load(const std::filesystem::path& checkpoint);
  void save(const std::filesystem::path& checkpoint) const;

  const RunSettings& settings() const { return settings_; }
  model::SaccNet& net() { return net_; }
  int epoch() const { return epoch_; }
  int64_t global_step() const { return global_step_; }

  /// One optimizer step on a label-free mini-batch.
  loss::LossReport train_step(std::span<const Image> batch);

  /// One pass over `images` in the epoch's shuffled order (ragged tail dropped).
  std::vector<StepRecord> run_epoch(std::span<const Image> images);

  /// Cluster labels of clean images: cluster-head argmax, or k-means on
  /// normalized instance features for the instance-only mode.
  std::vector<int> predict(std::span<const Image> images);

  metrics::EvalReport evaluate(std::span<const Image> images, const data::EvalLabels& labels);

 private:
  RunSettings settings_;
  model::SaccNet net_{nullptr};
  std::unique_ptr<torch::optim::Adam> optimizer_;
  aug::Rng rng_;
  int epoch_ = 0;
  int64_t global_step_ = 0;
};

struct TrainOptions {
  // Artifacts (metrics.jsonl, checkpoints, run_record.json, config.toml,
  // embeddings.csv) are written here when set.
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::filesystem::path> resume_from;
  // Optional sink for progress lines.
  std::function<void(const std::string&)> progress;
};

/// Number of clusters equals the dataset's class count when the config
/// leaves it at 0.
RunSettings resolve_settings(RunSettings settings, const data::Dataset& data);

/// Evaluates at epoch 0, every eval_every epochs and after the last epoch
/// (when labels exist). A non-finite loss saves last_good.pt and rethrows.
RunRecord train(const RunSettings& settings, const data::Dataset& data,
                const TrainOptions& options = {});

metrics::EvalReport evaluate(const std::filesystem::path& checkpoint, const data::Dataset& data);

struct AblationRow {
  std::string mode;
  metrics::EvalReport report;
};

/// Trains one fresh model per mode with identical settings otherwise.
std::vector<AblationRow> ablate(const RunSettings& settings, const data::Dataset& data,
                                const std::vector<std::string>& modes,
                                const std::optional<std::filesystem::path>& output_dir = {});

/// Markdown table: mode | NMI | ACC | ARI.
std::string ablation_markdown(const std::vector<AblationRow>& rows);
std::string ablation_csv(const std::vector<AblationRow>& rows);

/// The six ablation rows in table order.
const std::vector<std::string>& all_ablation_modes();

}  // namespace sacc::train

#endif  // SACC_TRAIN_HPP_
