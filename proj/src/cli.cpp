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

#include "sacc/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sacc/aug.hpp"
#include "sacc/config.hpp"
#include "sacc/data.hpp"
#include "sacc/error.hpp"
#include "sacc/image_io.hpp"
#include "sacc/plot.hpp"
#include "sacc/train.hpp"

#ifndef SACC_TSNE_SCRIPT
#define SACC_TSNE_SCRIPT "tools/tsne_embed.py"
#endif

namespace sacc::cli {
namespace fs = std::filesystem;
namespace {

using Overrides = std::vector<std::pair<std::string, std::string>>;

// Accepts `--a.b value`, `--a.b=value` and `--set a.b=value`.
Overrides parse_overrides(const std::vector<std::string>& extras, const std::vector<std::string>& sets) {
  Overrides out;
  auto split = [&](const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + kv + "' is not key=value");
    out.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
  };
  for (const auto& s : sets) split(s);
  for (size_t i = 0; i < extras.size(); ++i) {
    const std::string& arg = extras[i];
    if (arg.rfind("--", 0) != 0 || arg.find('.') == std::string::npos) {
      throw ConfigError("unexpected argument '" + arg + "'");
    }
    const std::string body = arg.substr(2);
    if (body.find('=') != std::string::npos) {
      split(body);
    } else if (i + 1 < extras.size()) {
      out.emplace_back(body, extras[++i]);
    } else {
      throw ConfigError("override '" + arg + "' has no value");
    }
  }
  return out;
}

std::string fmt4(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << v;
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

struct Context {
  std::ostream& out;
  std::ostream& err;
};

int cmd_train(Context& ctx, const fs::path& config, const std::optional<fs::path>& resume,
              const Overrides& overrides) {
  RunSettings settings = load_run_config(config, overrides);
  data::Dataset ds = data::load_dataset(settings.dataset);
  train::TrainOptions opts;
  opts.output_dir = settings.output_dir;
  opts.resume_from = resume;
  opts.progress = [&](const std::string& line) { ctx.out << line << std::endl; };
  train::RunRecord record = train::train(settings, ds, opts);
  ctx.out << "trained " << record.steps.size() << " steps in " << fmt4(record.wall_seconds)
          << " s; artifacts in " << settings.output_dir.string() << "\n";
  if (!record.evals.empty()) {
    const auto& r = record.evals.back().report;
    ctx.out << "final NMI " << fmt4(r.nmi) << " ACC " << fmt4(r.acc) << " ARI " << fmt4(r.ari) << "\n";
  }
  return kExitOk;
}

int cmd_eval(Context& ctx, const fs::path& checkpoint, const std::optional<fs::path>& config,
             const std::optional<fs::path>& out_dir, const Overrides& overrides) {
  RunSettings settings = config ? load_run_config(*config, overrides)
                                : train::Trainer::load(checkpoint).settings();
  data::Dataset ds = data::load_dataset(settings.dataset);
  metrics::EvalReport report = train::evaluate(checkpoint, ds);
  const fs::path dir = out_dir ? *out_dir
                               : (checkpoint.has_parent_path() ? checkpoint.parent_path() : fs::path("."));
  write_text(dir / "eval_report.json", metrics::to_json(report).dump(2) + "\n");
  write_image(dir / "confusion.png", plot::render_confusion(report.confusion));
  ctx.out << "NMI " << fmt4(report.nmi) << " ACC " << fmt4(report.acc) << " ARI " << fmt4(report.ari)
          << " (" << report.num_samples << " samples)\n";
  ctx.out << "wrote " << (dir / "eval_report.json").string() << " and "
          << (dir / "confusion.png").string() << "\n";
  return kExitOk;
}

int cmd_ablate(Context& ctx, const fs::path& config, const std::vector<std::string>& modes_arg,
               const std::optional<fs::path>& out_dir, const Overrides& overrides) {
  RunSettings settings = load_run_config(config, overrides);
  std::vector<std::string> modes;
  for (const auto& m : modes_arg) {
    if (m == "all") {
      modes = train::all_ablation_modes();
      break;
    }
    parse_mode(m);
    modes.push_back(m);
  }
  if (modes.empty()) modes = train::all_ablation_modes();
  const fs::path dir = out_dir ? *out_dir : settings.output_dir / "ablation";
  data::Dataset ds = data::load_dataset(settings.dataset);
  auto rows = train::ablate(settings, ds, modes, dir);
  const std::string table = train::ablation_markdown(rows);
  write_text(dir / "ablation.md", table);
  write_text(dir / "ablation.csv", train::ablation_csv(rows));
  ctx.out << table;
  return kExitOk;
}

int cmd_plot(Context& ctx, const fs::path& run_dir, int tsne_seed, const fs::path& script) {
  const fs::path log_path = run_dir / "metrics.jsonl";
  plot::MetricsLog log = plot::read_metrics_log(log_path);
  if (log.loss.xs.empty() && !log.has_evals()) throw DataError("metrics log is empty: " + log_path.string());
  if (!log.loss.xs.empty()) {
    write_image(run_dir / "loss_curve.png",
                plot::render_curves(std::span(&log.loss, 1), "Training loss", "step"));
    ctx.out << "wrote " << (run_dir / "loss_curve.png").string() << "\n";
  }
  if (log.has_evals()) {
    write_image(run_dir / "metrics_curve.png",
                plot::render_curves(log.scores, "Clustering scores", "epoch"));
    ctx.out << "wrote " << (run_dir / "metrics_curve.png").string() << "\n";
  }
  const fs::path emb_path = run_dir / "embeddings.csv";
  if (!fs::exists(emb_path)) return kExitOk;

  std::ifstream in(emb_path);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  bool labelled = true;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    if (cell.empty()) labelled = false;
    else labels.push_back(std::stoi(cell));
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return kExitOk;
  Eigen::MatrixXd features(rows.size(), rows.front().size());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) throw DataError("ragged row in " + emb_path.string());
    for (size_t k = 0; k < rows[i].size(); ++k) features(i, k) = rows[i][k];
  }
  auto coords = plot::tsne(features, tsne_seed, script);
  if (!coords) {
    ctx.err << "warning: t-SNE unavailable (needs python3 with scikit-learn); skipping scatter\n";
    return kExitOk;
  }
  write_image(run_dir / "tsne.png", plot::render_scatter(*coords, labelled ? &labels : nullptr));
  ctx.out << "wrote " << (run_dir / "tsne.png").string() << "\n";
  return kExitOk;
}

int cmd_augment_preview(Context& ctx, const fs::path& config, const std::vector<fs::path>& images,
                        const fs::path& out_path, const Overrides& overrides) {
  RunSettings settings = load_run_config(config, overrides);
  const Size size = settings.dataset.resize_to;
  std::seed_seq seq{static_cast<uint32_t>(settings.weak.rng_seed),
                    static_cast<uint32_t>(settings.strong.rng_seed)};
  aug::Rng rng(seq);
  std::vector<std::array<Image, 4>> rows;
  for (const auto& path : images) {
    Image img;
    try {
      img = read_image(path);
    } catch (const DataError& e) {
      ctx.err << "warning: skipping " << path.string() << ": " << e.what() << "\n";
      continue;
    }
    aug::ViewTriple v = aug::sample_views(img, settings.weak, settings.strong, rng, size);
    rows.push_back({resize_bilinear(img, size), std::move(v.weak_a), std::move(v.weak_b),
                    std::move(v.strong)});
  }
  if (rows.empty()) throw DataError("no readable input images");
  write_image(out_path, plot::preview_grid(rows));
  ctx.out << "wrote " << rows.size() << "x4 grid to " << out_path.string() << "\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Self-supervised contrastive image clustering"};
  app.require_subcommand(1);
  Context ctx{out, err};

  std::vector<std::string> sets;
  fs::path config, checkpoint, run_dir, out_file;
  std::optional<fs::path> resume, out_dir, eval_config;
  std::vector<std::string> modes;
  std::vector<fs::path> images;
  int tsne_seed = 0;
  std::string tsne_script;
  if (const char* env = std::getenv("SACC_TSNE_SCRIPT"); env && *env) tsne_script = env;
  else tsne_script = SACC_TSNE_SCRIPT;

  auto* train = app.add_subcommand("train", "Train a model; extra --section.key value pairs override the config");
  train->add_option("--config", config, "run configuration (TOML)")->required();
  train->add_option("--resume", resume, "checkpoint to resume from");
  train->add_option("--set", sets, "override as key=value");
  train->allow_extras();

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on its dataset");
  eval->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  eval->add_option("--config", eval_config, "run configuration; defaults to the checkpoint's own");
  eval->add_option("--out", out_dir, "directory for eval_report.json and confusion.png");
  eval->add_option("--set", sets, "override as key=value");
  eval->allow_extras();

  auto* ablate = app.add_subcommand("ablate", "Train each ablation mode and tabulate scores");
  ablate->add_option("--config", config, "run configuration (TOML)")->required();
  ablate->add_option("--modes", modes, "modes, or 'all'")->delimiter(',');
  ablate->add_option("--out", out_dir, "output directory");
  ablate->add_option("--set", sets, "override as key=value");
  ablate->allow_extras();

  auto* plot = app.add_subcommand("plot", "Render curves and a t-SNE scatter for a run");
  plot->add_option("--run-dir", run_dir, "directory holding metrics.jsonl")->required();
  plot->add_option("--tsne-seed", tsne_seed, "t-SNE random state");
  plot->add_option("--tsne-script", tsne_script, "helper script computing t-SNE");

  auto* preview = app.add_subcommand("augment-preview", "Grid of original | weak | weak | strong");
  preview->add_option("--config", config, "run configuration (TOML)")->required();
  preview->add_option("--out", out_file, "output image")->required();
  preview->add_option("--set", sets, "override as key=value");
  preview->add_option("images", images, "input images")->required();

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << "\n";
      return kExitConfig;
    }
    if (*train) {
      return cmd_train(ctx, config, resume, parse_overrides(train->remaining(), sets));
    }
    if (*eval) {
      return cmd_eval(ctx, checkpoint, eval_config, out_dir, parse_overrides(eval->remaining(), sets));
    }
    if (*ablate) {
      return cmd_ablate(ctx, config, modes, out_dir, parse_overrides(ablate->remaining(), sets));
    }
    if (*plot) return cmd_plot(ctx, run_dir, tsne_seed, tsne_script);
    if (*preview) return cmd_augment_preview(ctx, config, images, out_file, parse_overrides({}, sets));
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace sacc::cli
