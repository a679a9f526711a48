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

// Acceptance runner: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "sacc/aug.hpp"
#include "sacc/config.hpp"
#include "sacc/data.hpp"
#include "sacc/loss.hpp"
#include "sacc/metrics.hpp"
#include "sacc/train.hpp"

#ifndef SACC_SYNTHETIC_CONFIG
#define SACC_SYNTHETIC_CONFIG "configs/synthetic.toml"
#endif

namespace fs = std::filesystem;
using namespace sacc;
using loss::Matrix;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(2) << v;
  return os.str();
}

double max_relative_error(const Matrix& analytic, const Matrix& numeric) {
  double worst = 0;
  for (int i = 0; i < analytic.rows(); ++i) {
    for (int j = 0; j < analytic.cols(); ++j) {
      const double scale = std::max({std::abs(analytic(i, j)), std::abs(numeric(i, j)), 1e-3});
      worst = std::max(worst, std::abs(analytic(i, j) - numeric(i, j)) / scale);
    }
  }
  return worst;
}

Outcome loss_oracle() {
  const auto t0 = Clock::now();
  double worst = 0;
  for (unsigned seed = 0; seed < 200; ++seed) {
    const int n = 2 + seed % 7, m = 2 + (seed / 7) % 4, d = 1 + seed % 5;
    std::vector<Matrix> y, c;
    for (unsigned v = 0; v < 3; ++v) {
      y.push_back(oracle::random_matrix(n, d, seed * 31 + v));
      c.push_back(oracle::random_simplex_rows(n, m, seed * 31 + v + 11));
    }
    worst = std::max(worst, std::abs(loss::instance_loss(y[0], y[1], y[2], {}) -
                                     (oracle::instance_pair(y[0], y[1], 0.5) +
                                      oracle::instance_pair(y[1], y[2], 0.5))));
    worst = std::max(worst, std::abs(loss::cluster_loss(c[0], c[1], c[2], {}) -
                                     (oracle::cluster_pair(c[0], c[1], 1.0) +
                                      oracle::cluster_pair(c[0], c[2], 1.0) +
                                      oracle::cluster_pair(c[1], c[2], 1.0))));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-6 && secs < 30,
          "200 instances, max |diff| " + sci(worst) + ", " + fmt(secs, 3) + " s"};
}

Outcome gradient_check() {
  const auto t0 = Clock::now();
  double worst = 0;
  for (unsigned seed = 1; seed <= 5; ++seed) {
    std::vector<Matrix> y, c;
    for (unsigned v = 0; v < 3; ++v) {
      y.push_back(oracle::random_matrix(6, 5, seed * 10 + v));
      c.push_back(oracle::random_simplex_rows(6, 3, seed * 10 + v + 5));
    }
    loss::LossGradients g;
    loss::total_loss(y, c, {}, {}, loss::ObjectiveLayout::full(), &g);
    loss::ClusterLossConfig loose;
    loose.simplex_tolerance = 1e-3;
    for (int v = 0; v < 3; ++v) {
      auto fy = [&](const Matrix& yv) {
        std::vector<Matrix> probe = y;
        probe[v] = yv;
        return loss::total_loss(probe, c, {}, {}).total;
      };
      auto fc = [&](const Matrix& cv) {
        std::vector<Matrix> probe = c;
        probe[v] = cv;
        return loss::total_loss(y, probe, {}, loose).total;
      };
      worst = std::max(worst, max_relative_error(g.y[v], oracle::finite_difference(fy, y[v])));
      worst = std::max(worst, max_relative_error(g.c[v], oracle::finite_difference(fc, c[v])));
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-4 && secs < 60,
          "N=6 M=3, 5 instances, max rel err " + sci(worst) + ", " + fmt(secs, 3) + " s"};
}

Outcome metric_oracle() {
  double worst_acc = 0, worst_nmi = 0, worst_ari = 0;
  for (unsigned seed = 0; seed < 500; ++seed) {
    std::mt19937 rng(seed);
    const int n = std::uniform_int_distribution<int>(2, 40)(rng);
    const int kt = std::uniform_int_distribution<int>(1, 6)(rng);
    const int kp = std::uniform_int_distribution<int>(1, 6)(rng);
    metrics::LabelPair p{oracle::random_labels(n, kt, seed), oracle::random_labels(n, kp, seed + 1000)};
    worst_acc = std::max(worst_acc,
                         std::abs(metrics::accuracy(p) - oracle::brute_force_accuracy(p.y_true, p.y_pred)));
    worst_nmi = std::max(worst_nmi, std::abs(metrics::nmi(p) - oracle::naive_nmi(p.y_true, p.y_pred)));
    worst_ari = std::max(worst_ari,
                         std::abs(metrics::ari(p) - oracle::pair_enumeration_ari(p.y_true, p.y_pred)));
  }
  const double independent = metrics::ari({{0, 0, 1, 1}, {0, 1, 0, 1}});
  return {worst_acc <= 1e-12 && worst_nmi <= 1e-10 && worst_ari <= 1e-10 && independent == -0.5,
          "500 instances, acc " + sci(worst_acc) + " nmi " + sci(worst_nmi) + " ari " +
              sci(worst_ari) + ", independent-partition ari " + fmt(independent)};
}

Outcome anti_collapse() {
  Matrix balanced(4, 2);
  balanced << 1, 0, 1, 0, 0, 1, 0, 1;
  Matrix collapsed(4, 2);
  collapsed.col(0).setConstant(1 - 1e-9);
  collapsed.col(1).setConstant(1e-9);
  const double good = loss::cluster_pair_loss(balanced, balanced, {});
  const double bad = loss::cluster_pair_loss(collapsed, collapsed, {});
  const double reference = oracle::cluster_pair(balanced, balanced, 1.0);
  constexpr double kStated = -0.79544;
  // Direct summation gives log(1 + 2/e) - 2 log 2 for the balanced example.
  const double closed_form = std::log1p(2.0 / std::exp(1.0)) - 2.0 * std::log(2.0);
  const bool pass = bad > good && std::abs(good - reference) <= 1e-12 &&
                    std::abs(good - closed_form) <= 1e-12;
  return {pass, "collapsed " + fmt(bad, 6) + " > balanced " + fmt(good, 6) + "; oracle " +
                    fmt(reference, 6) + " (stated example value " + fmt(kStated, 5) +
                    " differs by " + fmt(reference - kStated, 4) + ")"};
}

Outcome invariances() {
  double worst = 0;
  for (unsigned seed = 0; seed < 20; ++seed) {
    const int n = 3 + seed % 6;
    Matrix ya = oracle::random_matrix(n, 4, seed), yb = oracle::random_matrix(n, 4, seed + 100);
    const double base = loss::instance_pair_loss(ya, yb, {});
    std::mt19937 rng(seed);
    for (double lambda : {0.1, 1.0, 10.0}) {
      worst = std::max(worst, std::abs(loss::instance_pair_loss(lambda * ya, yb, {}) - base));
      Matrix per_row = ya;
      for (int i = 0; i < n; ++i)
        per_row.row(i) *= lambda * std::uniform_real_distribution<double>(0.5, 2.0)(rng);
      worst = std::max(worst, std::abs(loss::instance_pair_loss(per_row, yb, {}) - base));
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    Matrix pa(n, 4), pb(n, 4);
    for (int i = 0; i < n; ++i) {
      pa.row(i) = ya.row(order[i]);
      pb.row(i) = yb.row(order[i]);
    }
    worst = std::max(worst, std::abs(loss::instance_pair_loss(pa, pb, {}) - base));

    const int m = 2 + seed % 4;
    std::vector<Matrix> c;
    for (unsigned v = 0; v < 3; ++v) c.push_back(oracle::random_simplex_rows(n, m, seed * 3 + v));
    std::vector<int> cols(m);
    std::iota(cols.begin(), cols.end(), 0);
    std::shuffle(cols.begin(), cols.end(), rng);
    std::vector<Matrix> relabeled;
    for (const Matrix& cv : c) {
      Matrix r(n, m);
      for (int j = 0; j < m; ++j) r.col(j) = cv.col(cols[j]);
      relabeled.push_back(r);
    }
    worst = std::max(worst, std::abs(loss::cluster_loss(c[0], c[1], c[2], {}) -
                                     loss::cluster_loss(relabeled[0], relabeled[1], relabeled[2], {})));
  }
  return {worst <= 1e-6, "scale (0.1, 1, 10), row permutation, column relabel; max |diff| " + sci(worst)};
}

RunSettings small_run(uint64_t seed) {
  RunSettings s;
  s.dataset.source = data::Source::kSynthetic;
  s.dataset.resize_to = {16, 16};
  s.dataset.synthetic.num_classes = 3;
  s.dataset.synthetic.per_class = 16;
  s.dataset.synthetic.image_size = {16, 16};
  s.model.backbone = {model::Architecture::kSmallConv, 32};
  s.model.instance.out_dim = 16;
  s.train.batch_size = 16;
  s.train.epochs = 4;
  s.train.eval_every = 1;
  s.train.seed = seed;
  s.train.learning_rate = 1e-3;
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<double> totals(const train::RunRecord& r) {
  std::vector<double> out;
  for (const auto& s : r.steps) out.push_back(s.loss.total);
  return out;
}

Outcome determinism(const fs::path& work) {
  RunSettings s = small_run(3);
  data::Dataset d = data::load_dataset(s.dataset);
  train::TrainOptions a, b;
  a.output_dir = work / "first";
  b.output_dir = work / "second";
  train::train(s, d, a);
  train::train(s, d, b);
  const bool same_log = slurp(work / "first" / "metrics.jsonl") == slurp(work / "second" / "metrics.jsonl");

  RunSettings head = s;
  head.train.epochs = 2;
  train::TrainOptions h;
  h.output_dir = work / "resumed";
  train::RunRecord first = train::train(head, d, h);
  h.resume_from = work / "resumed" / "final.pt";
  train::RunRecord rest = train::train(s, d, h);
  std::vector<double> joined = totals(first);
  for (double v : totals(rest)) joined.push_back(v);
  const std::vector<double> straight = totals(train::train(s, d));
  const bool same_trajectory = joined == straight;
  return {same_log && same_trajectory,
          std::string("metric logs ") + (same_log ? "identical" : "differ") + ", resumed trajectory " +
              (same_trajectory ? "identical" : "differs") + " over " + std::to_string(straight.size()) +
              " steps"};
}

Outcome augmentation() {
  double worst_range = 0;
  bool shapes = true, identity = true;
  double strong_l1 = 0, weak_l1 = 0;
  aug::Rng rng(17);
  aug::StrongAugSpec identity_strong;
  identity_strong.op_family = {aug::StrongOp::kIdentity};
  for (unsigned i = 0; i < 100; ++i) {
    Image img = oracle::smooth_image(i, {48 + static_cast<int>(i % 5) * 8, 48});
    aug::ViewTriple t = aug::sample_views(img, {}, {}, rng);
    Image plain = resize_bilinear(img, aug::kViewSize);
    for (const Image* v : {&t.strong, &t.weak_a, &t.weak_b}) {
      shapes = shapes && v->size() == aug::kViewSize;
      for (float x : v->pixels()) worst_range = std::max<double>(worst_range, std::max(-x, x - 1.0f));
    }
    strong_l1 += mean_abs_diff(t.strong, plain);
    weak_l1 += 0.5 * (mean_abs_diff(t.weak_a, plain) + mean_abs_diff(t.weak_b, plain));
    if (i < 10) {
      aug::ViewTriple id = aug::sample_views(img, aug::WeakAugSpec::identity(), identity_strong, rng);
      identity = identity && id.strong == plain && id.weak_a == plain && id.weak_b == plain;
    }
  }
  strong_l1 /= 100;
  weak_l1 /= 100;
  return {worst_range <= 0 && shapes && identity && strong_l1 > weak_l1,
          std::string("range ") + (worst_range <= 0 ? "ok" : "violated") + ", 224x224 " +
              (shapes ? "ok" : "wrong") + ", identity " + (identity ? "no-op" : "changed") +
              ", mean L1 strong " + fmt(strong_l1) + " > weak " + fmt(weak_l1)};
}

struct SeedRuns {
  std::map<std::string, metrics::EvalReport> by_mode;
  double full_seconds = 0;
};

std::vector<SeedRuns> run_ablation_grid(const RunSettings& base, int seeds) {
  data::Dataset d = data::load_dataset(base.dataset);
  std::vector<SeedRuns> out;
  for (int seed = 0; seed < seeds; ++seed) {
    SeedRuns runs;
    for (const std::string& mode : train::all_ablation_modes()) {
      if (mode == "both" && runs.by_mode.count("weak_weak_strong")) {
        runs.by_mode[mode] = runs.by_mode["weak_weak_strong"];
        continue;
      }
      RunSettings s = base;
      s.train.seed = static_cast<uint64_t>(seed);
      s.train.mode = parse_mode(mode);
      const auto t0 = Clock::now();
      train::RunRecord r = train::train(s, d);
      const double secs = seconds_since(t0);
      runs.by_mode[mode] = r.evals.back().report;
      if (mode == "weak_weak_strong") runs.full_seconds = secs;
      std::cout << "  seed " << seed << " " << std::left << std::setw(18) << mode << " NMI "
                << fmt(r.evals.back().report.nmi) << " ACC " << fmt(r.evals.back().report.acc)
                << " (" << fmt(secs, 3) << " s)" << std::endl;
    }
    out.push_back(std::move(runs));
  }
  return out;
}

double median_nmi(const std::vector<SeedRuns>& grid, const std::string& mode) {
  std::vector<double> v;
  for (const auto& g : grid) v.push_back(g.by_mode.at(mode).nmi);
  return oracle::median(v);
}

Outcome desk_training(const std::vector<SeedRuns>& grid) {
  int good = 0;
  double secs = 0;
  std::string scores;
  for (const auto& g : grid) {
    const auto& r = g.by_mode.at("weak_weak_strong");
    good += r.acc >= 0.90 && r.nmi >= 0.75;
    secs += g.full_seconds;
    scores += " (" + fmt(r.acc, 3) + ", " + fmt(r.nmi, 3) + ")";
  }
  const int need = (2 * static_cast<int>(grid.size()) + 2) / 3;
  return {good >= need && secs < 900,
          std::to_string(good) + "/" + std::to_string(grid.size()) + " seeds reach ACC>=0.90 NMI>=0.75," +
              " (ACC, NMI):" + scores + ", " + fmt(secs, 4) + " s"};
}

Outcome view_ablation(const std::vector<SeedRuns>& grid) {
  const double ww = median_nmi(grid, "weak_weak"), ws = median_nmi(grid, "weak_strong");
  const double full = median_nmi(grid, "weak_weak_strong");
  return {ww <= full && ws <= full, "median NMI weak_weak " + fmt(ww) + ", weak_strong " + fmt(ws) +
                                        " <= weak_weak_strong " + fmt(full)};
}

Outcome projector_ablation(const std::vector<SeedRuns>& grid) {
  const double inst = median_nmi(grid, "with_instance_only");
  const double clus = median_nmi(grid, "with_cluster_only");
  const double both = median_nmi(grid, "both");
  return {both >= inst && both >= clus, "median NMI both " + fmt(both) + " >= instance_only " +
                                            fmt(inst) + ", cluster_only " + fmt(clus)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::string config = SACC_SYNTHETIC_CONFIG;
  std::string only;
  std::string work = (fs::temp_directory_path() / "sacc_acceptance").string();
  int seeds = 3;
  int epochs = 0;
  app.add_option("--config", config, "Training config for the desk-scale runs");
  app.add_option("--only", only, "Comma-separated criteria, e.g. A1,A6");
  app.add_option("--seeds", seeds, "Seeds per training mode")->check(CLI::PositiveNumber);
  app.add_option("--epochs", epochs, "Override train.epochs (0 keeps the config value)");
  app.add_option("--work-dir", work, "Scratch directory");
  CLI11_PARSE(app, argc, argv);

  std::set<std::string> selected;
  for (std::stringstream ss(only); ss.good();) {
    std::string id;
    std::getline(ss, id, ',');
    if (!id.empty()) selected.insert(id);
  }
  auto wanted = [&](const std::string& id) { return selected.empty() || selected.count(id) > 0; };

  fs::remove_all(work);
  fs::create_directories(work);

  std::vector<std::pair<std::string, Outcome>> results;
  auto record = [&](const std::string& id, const std::function<Outcome()>& check) {
    if (!wanted(id)) return;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::cout << id << " " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
    results.emplace_back(id, o);
  };

  record("A1", loss_oracle);
  record("A2", gradient_check);

  if (wanted("A3") || wanted("A4") || wanted("A5")) {
    std::vector<SeedRuns> grid;
    std::string failure;
    try {
      std::vector<std::pair<std::string, std::string>> overrides{{"train.eval_every", "0"},
                                                                  {"train.progress_every", "0"},
                                                                  {"train.save_embeddings", "false"}};
      if (epochs > 0) overrides.emplace_back("train.epochs", std::to_string(epochs));
      grid = run_ablation_grid(load_run_config(config, overrides), seeds);
    } catch (const std::exception& e) {
      failure = e.what();
    }
    auto guarded = [&](Outcome (*check)(const std::vector<SeedRuns>&)) {
      return [&, check]() -> Outcome {
        if (!failure.empty()) return {false, "training failed: " + failure};
        return check(grid);
      };
    };
    record("A3", guarded(desk_training));
    record("A4", guarded(view_ablation));
    record("A5", guarded(projector_ablation));
  }

  record("A6", metric_oracle);
  record("A7", anti_collapse);
  record("A8", invariances);
  record("A9", [&] { return determinism(work); });
  record("A10", augmentation);

  const auto failed = std::count_if(results.begin(), results.end(), [](const auto& r) { return !r.second.pass; });
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed" << std::endl;
  fs::remove_all(work);
  return failed == 0 ? 0 : 1;
}
