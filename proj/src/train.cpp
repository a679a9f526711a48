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

#include "sacc/train.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "sacc/error.hpp"
#include "sacc/kmeans.hpp"

namespace sacc::train {
namespace fs = std::filesystem;
namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

loss::Matrix to_eigen(const torch::Tensor& t) {
  auto d = t.detach().to(torch::kFloat64).contiguous();
  return Eigen::Map<const RowMajor>(d.data_ptr<double>(), d.size(0), d.size(1));
}

torch::Tensor from_eigen(const loss::Matrix& m) {
  RowMajor rm = m;
  return torch::from_blob(rm.data(), {rm.rows(), rm.cols()}, torch::kFloat64)
      .clone()
      .to(torch::kFloat32);
}

aug::Rng seeded_rng(const RunSettings& s) {
  std::seed_seq seq{static_cast<uint32_t>(s.train.seed), static_cast<uint32_t>(s.train.seed >> 32),
                    static_cast<uint32_t>(s.weak.rng_seed), static_cast<uint32_t>(s.strong.rng_seed)};
  return aug::Rng(seq);
}

std::unique_ptr<torch::optim::Adam> make_optimizer(model::SaccNet& net, const TrainConfig& t) {
  auto opts = torch::optim::AdamOptions(t.learning_rate)
                  .betas({t.adam_beta1, t.adam_beta2})
                  .eps(t.adam_eps)
                  .weight_decay(t.weight_decay);
  return std::make_unique<torch::optim::Adam>(net->parameters(), opts);
}

std::string read_string(torch::serialize::InputArchive& ar, const std::string& key) {
  c10::IValue v;
  if (!ar.try_read(key, v) || !v.isString()) throw DataError("checkpoint lacks '" + key + "'");
  return v.toStringRef();
}

int64_t read_int(torch::serialize::InputArchive& ar, const std::string& key) {
  c10::IValue v;
  if (!ar.try_read(key, v) || !v.isInt()) throw DataError("checkpoint lacks '" + key + "'");
  return v.toInt();
}

class JsonlLog {
 public:
  JsonlLog() = default;
  JsonlLog(const fs::path& path, bool append) {
    if (append && fs::exists(path)) {
      std::ifstream in(path);
      for (std::string line; std::getline(in, line);) ++seq_;
    }
    out_.open(path, append ? std::ios::app : std::ios::trunc);
    if (!out_) throw DataError("cannot open metrics log " + path.string());
  }

  void write(nlohmann::json record) {
    if (!out_.is_open()) return;
    record["seq"] = seq_++;
    out_ << record.dump() << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
  int64_t seq_ = 0;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

void write_embeddings(const fs::path& path, Trainer& trainer, const data::Dataset& data) {
  torch::Tensor y = model::instance_features(trainer.net(), data.images,
                                             trainer.settings().train.eval_batch_size);
  auto acc = y.accessor<float, 2>();
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "label";
  for (int64_t k = 0; k < y.size(1); ++k) out << ",f" << k;
  out << '\n' << std::setprecision(9);
  for (int64_t i = 0; i < y.size(0); ++i) {
    if (data.labels) out << data.labels->labels[i];
    for (int64_t k = 0; k < y.size(1); ++k) out << ',' << acc[i][k];
    out << '\n';
  }
}

}  // namespace

loss::ObjectiveLayout layout_for(TrainMode mode) {
  const auto full = loss::ObjectiveLayout::full();
  switch (mode) {
    case TrainMode::kFull: return full;
    case TrainMode::kWeakWeak: return {{{2, 3}}, {{2, 3}}};
    case TrainMode::kWeakStrong: return {{{1, 2}}, {{1, 2}}};
    case TrainMode::kInstanceOnly: return {full.instance_pairs, {}};
    case TrainMode::kClusterOnly: return {{}, full.cluster_pairs};
  }
  return full;
}

nlohmann::json to_json(const StepRecord& r) {
  nlohmann::json j = {{"type", "step"}, {"epoch", r.epoch}, {"step", r.step}, {"total", r.loss.total}};
  for (const auto& t : r.loss.instance_terms) j[loss::term_name("instance", t.views)] = t.value;
  for (const auto& t : r.loss.cluster_terms) {
    j[loss::term_name("cluster", t.views)] = t.value;
    j[loss::term_name("entropy", t.views)] = t.entropy;
  }
  return j;
}

nlohmann::json to_json(const EvalRecord& r) {
  return {{"type", "eval"},       {"epoch", r.epoch},     {"step", r.step},
          {"nmi", r.report.nmi}, {"acc", r.report.acc}, {"ari", r.report.ari}};
}

Trainer::Trainer(RunSettings settings) : settings_(std::move(settings)) {
  settings_.validate();
  if (settings_.model.cluster.num_clusters < 2) {
    throw ConfigError("model.num_clusters must be resolved to >= 2 before training");
  }
  torch::manual_seed(settings_.train.seed);
  net_ = model::SaccNet(settings_.model);
  net_->train();
  optimizer_ = make_optimizer(net_, settings_.train);
  rng_ = seeded_rng(settings_);
}

Trainer::~Trainer() = default;
Trainer::Trainer(Trainer&&) noexcept = default;
Trainer& Trainer::operator=(Trainer&&) noexcept = default;

loss::LossReport Trainer::train_step(std::span<const Image> batch) {
  const loss::ObjectiveLayout layout = layout_for(settings_.train.mode);
  const std::vector<int> used = layout.views_used();
  auto has = [&](int v) { return std::find(used.begin(), used.end(), v) != used.end(); };

  std::array<std::vector<Image>, 3> views;
  for (const Image& img : batch) {
    if (has(1) && has(2) && has(3)) {
      aug::ViewTriple t = aug::sample_views(img, settings_.weak, settings_.strong, rng_, img.size());
      views[0].push_back(std::move(t.strong));
      views[1].push_back(std::move(t.weak_a));
      views[2].push_back(std::move(t.weak_b));
      continue;
    }
    if (has(1)) views[0].push_back(aug::apply_strong(img, settings_.strong, rng_));
    if (has(2)) views[1].push_back(aug::apply_weak(img, settings_.weak, rng_, img.size()));
    if (has(3)) views[2].push_back(aug::apply_weak(img, settings_.weak, rng_, img.size()));
  }

  std::array<torch::Tensor, 3> inputs;
  for (int v : used) inputs[v - 1] = model::images_to_tensor(views[v - 1]);

  net_->train();
  std::vector<model::Embeddings> emb = model::forward_views(net_, inputs);
  std::array<loss::Matrix, 3> ys, cs;
  for (int v : used) {
    ys[v - 1] = to_eigen(emb[v - 1].y);
    cs[v - 1] = to_eigen(emb[v - 1].c);
  }
  loss::InstanceLossConfig icfg{settings_.train.tau_g, settings_.train.include_self_term};
  loss::ClusterLossConfig ccfg{settings_.train.tau_h, settings_.train.include_self_term};
  loss::LossGradients grads;
  loss::LossReport report = loss::total_loss(ys, cs, icfg, ccfg, layout, &grads);

  std::vector<torch::Tensor> outputs, output_grads;
  for (int v : used) {
    if (grads.y[v - 1].size() > 0) {
      outputs.push_back(emb[v - 1].y);
      output_grads.push_back(from_eigen(grads.y[v - 1]));
    }
    if (grads.c[v - 1].size() > 0) {
      outputs.push_back(emb[v - 1].c);
      output_grads.push_back(from_eigen(grads.c[v - 1]));
    }
  }
  optimizer_->zero_grad();
  torch::autograd::backward(outputs, output_grads);
  optimizer_->step();
  ++global_step_;
  return report;
}

std::vector<StepRecord> Trainer::run_epoch(std::span<const Image> images) {
  auto batches = data::make_batches(images.size(), settings_.train.batch_size,
                                    data::BatchMode::kTrain, settings_.train.seed, epoch_);
  if (batches.empty()) {
    throw ConfigError("dataset of " + std::to_string(images.size()) +
                      " images is smaller than train.batch_size " +
                      std::to_string(settings_.train.batch_size));
  }
  std::vector<StepRecord> records;
  for (const auto& idx : batches) {
    std::vector<Image> batch = data::gather(images, idx);
    loss::LossReport report = train_step(batch);
    records.push_back({epoch_ + 1, global_step_, std::move(report)});
  }
  ++epoch_;
  return records;
}

std::vector<int> Trainer::predict(std::span<const Image> images) {
  const int bs = settings_.train.eval_batch_size;
  if (settings_.train.mode != TrainMode::kInstanceOnly) {
    return model::predict_clusters(net_, images, bs);
  }
  loss::Matrix y = to_eigen(model::instance_features(net_, images, bs));
  y = y.rowwise().normalized();
  return kmeans(y, settings_.model.cluster.num_clusters, settings_.train.seed).labels;
}

metrics::EvalReport Trainer::evaluate(std::span<const Image> images,
                                      const data::EvalLabels& labels) {
  return metrics::evaluate_labels({labels.labels, predict(images)});
}

void Trainer::save(const fs::path& checkpoint) const {
  torch::serialize::OutputArchive ar;
  ar.write("format", c10::IValue(std::string(kCheckpointFormat)));
  torch::serialize::OutputArchive model_ar;
  net_->save(model_ar);
  ar.write("model", model_ar);
  torch::serialize::OutputArchive optim_ar;
  optimizer_->save(optim_ar);
  ar.write("optimizer", optim_ar);
  ar.write("epoch", c10::IValue(static_cast<int64_t>(epoch_)));
  ar.write("global_step", c10::IValue(global_step_));
  ar.write("config", c10::IValue(to_toml(settings_)));
  std::ostringstream rng_state;
  rng_state << rng_;
  ar.write("rng_state", c10::IValue(rng_state.str()));
  if (checkpoint.has_parent_path()) fs::create_directories(checkpoint.parent_path());
  ar.save_to(checkpoint.string());
}

Trainer Trainer::load(const fs::path& checkpoint) {
  if (!fs::exists(checkpoint)) throw DataError("checkpoint not found: " + checkpoint.string());
  torch::serialize::InputArchive ar;
  try {
    ar.load_from(checkpoint.string());
  } catch (const c10::Error& e) {
    throw DataError("cannot read checkpoint " + checkpoint.string() + ": " + e.what_without_backtrace());
  }
  const std::string format = read_string(ar, "format");
  if (format != kCheckpointFormat) {
    throw DataError("checkpoint format '" + format + "' is not " + kCheckpointFormat);
  }
  Trainer t(parse_run_config(read_string(ar, "config"), checkpoint.string()));
  torch::serialize::InputArchive model_ar;
  ar.read("model", model_ar);
  t.net_->load(model_ar);
  torch::serialize::InputArchive optim_ar;
  ar.read("optimizer", optim_ar);
  t.optimizer_->load(optim_ar);
  t.epoch_ = static_cast<int>(read_int(ar, "epoch"));
  t.global_step_ = read_int(ar, "global_step");
  std::istringstream rng_state(read_string(ar, "rng_state"));
  rng_state >> t.rng_;
  return t;
}

RunSettings resolve_settings(RunSettings settings, const data::Dataset& data) {
  if (settings.model.cluster.num_clusters == 0) settings.model.cluster.num_clusters = data.num_classes;
  return settings;
}

RunRecord train(const RunSettings& requested, const data::Dataset& data, const TrainOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  Trainer trainer = options.resume_from ? Trainer::load(*options.resume_from)
                                        : Trainer(resolve_settings(requested, data));
  const int target_epochs = requested.train.epochs;
  const RunSettings& settings = trainer.settings();
  if (data.num_classes > 0 && trainer.settings().model.cluster.num_clusters < 2) {
    throw ConfigError("model.num_clusters must be >= 2");
  }

  RunRecord record;
  record.config_toml = to_toml(settings);
  JsonlLog log;
  if (options.output_dir) {
    fs::create_directories(*options.output_dir);
    write_text(*options.output_dir / "config.toml", record.config_toml);
    log = JsonlLog(*options.output_dir / "metrics.jsonl", options.resume_from.has_value());
  }

  auto run_eval = [&]() {
    if (!data.labels) return;
    EvalRecord e{trainer.epoch(), trainer.global_step(), trainer.evaluate(data.images, *data.labels)};
    log.write(to_json(e));
    if (options.progress) {
      std::ostringstream os;
      os << std::fixed << std::setprecision(4) << "eval epoch " << e.epoch << " NMI " << e.report.nmi
         << " ACC " << e.report.acc << " ARI " << e.report.ari;
      options.progress(os.str());
    }
    record.evals.push_back(std::move(e));
  };

  if (!options.resume_from) run_eval();
  const int eval_every = settings.train.eval_every;
  const int ckpt_every = settings.train.checkpoint_every;
  while (trainer.epoch() < target_epochs) {
    std::vector<StepRecord> steps;
    try {
      steps = trainer.run_epoch(data.images);
    } catch (const NumericalError&) {
      // Parameters are untouched by the failing step.
      if (options.output_dir) trainer.save(*options.output_dir / "last_good.pt");
      throw;
    }
    for (auto& s : steps) {
      log.write(to_json(s));
      if (options.progress && settings.train.progress_every > 0 &&
          s.step % settings.train.progress_every == 0) {
        std::ostringstream os;
        os << "epoch " << s.epoch << " step " << s.step << " loss " << std::setprecision(6)
           << s.loss.total;
        options.progress(os.str());
      }
      record.steps.push_back(std::move(s));
    }
    const int epoch = trainer.epoch();
    if ((eval_every > 0 && epoch % eval_every == 0) || epoch == target_epochs) run_eval();
    if (options.output_dir && ckpt_every > 0 && epoch % ckpt_every == 0 && epoch != target_epochs) {
      trainer.save(*options.output_dir / ("checkpoint_epoch" + std::to_string(epoch) + ".pt"));
    }
  }

  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  if (options.output_dir) {
    trainer.save(*options.output_dir / "final.pt");
    if (settings.train.save_embeddings) {
      write_embeddings(*options.output_dir / "embeddings.csv", trainer, data);
    }
    nlohmann::json summary = {{"wall_seconds", record.wall_seconds},
                              {"epochs", trainer.epoch()},
                              {"global_step", trainer.global_step()},
                              {"mode", mode_name(settings.train.mode)},
                              {"num_steps_logged", record.steps.size()}};
    if (!record.evals.empty()) summary["final_eval"] = metrics::to_json(record.evals.back().report);
    write_text(*options.output_dir / "run_record.json", summary.dump(2) + "\n");
  }
  return record;
}

metrics::EvalReport evaluate(const fs::path& checkpoint, const data::Dataset& data) {
  if (!data.labels) throw DataError("evaluation needs ground-truth labels");
  Trainer trainer = Trainer::load(checkpoint);
  const int clusters = trainer.settings().model.cluster.num_clusters;
  if (clusters != data.num_classes) {
    throw DataError("checkpoint has " + std::to_string(clusters) + " clusters but the dataset has " +
                      std::to_string(data.num_classes) + " classes");
  }
  return trainer.evaluate(data.images, *data.labels);
}

const std::vector<std::string>& all_ablation_modes() {
  static const std::vector<std::string> modes = {"weak_weak",          "weak_strong",
                                                 "weak_weak_strong",   "with_instance_only",
                                                 "with_cluster_only",  "both"};
  return modes;
}

std::vector<AblationRow> ablate(const RunSettings& settings, const data::Dataset& data,
                                const std::vector<std::string>& modes,
                                const std::optional<fs::path>& output_dir) {
  if (!data.labels) throw DataError("ablation needs ground-truth labels");
  std::vector<AblationRow> rows;
  for (const auto& mode : modes) {
    RunSettings s = settings;
    s.train.mode = parse_mode(mode);
    TrainOptions opts;
    if (output_dir) opts.output_dir = *output_dir / mode;
    RunRecord run = train(s, data, opts);
    if (run.evals.empty()) throw DataError("ablation run for " + mode + " produced no evaluation");
    rows.push_back({mode, run.evals.back().report});
  }
  return rows;
}

std::string ablation_markdown(const std::vector<AblationRow>& rows) {
  std::ostringstream os;
  os << "| Mode | NMI | ACC | ARI |\n|---|---|---|---|\n" << std::fixed << std::setprecision(4);
  for (const auto& r : rows) {
    os << "| " << r.mode << " | " << r.report.nmi << " | " << r.report.acc << " | " << r.report.ari
       << " |\n";
  }
  return os.str();
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::ostringstream os;
  os << "mode,nmi,acc,ari\n" << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.mode << ',' << r.report.nmi << ',' << r.report.acc << ',' << r.report.ari << '\n';
  }
  return os.str();
}

}  // namespace sacc::train
