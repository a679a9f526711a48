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

#include "sacc/config.hpp"

#include <cstdlib>
#include <fstream>

#include <gtest/gtest.h>

#include "sacc/error.hpp"

namespace sacc {
namespace {
namespace fs = std::filesystem;

const char* kSynthetic = R"(
output_dir = "runs/x"

[dataset]
source = "synthetic"
resize_to = [32, 32]

[dataset.synthetic]
num_classes = 3
per_class = 16
image_size = [32, 32]

[model]
backbone = "small_conv"

[train]
batch_size = 16
epochs = 4
mode = "weak_strong"

[aug.strong]
ops = ["Identity", "Rotate"]
num_ops = 2
)";

std::string error_of(const std::string& text) {
  try {
    parse_run_config(text, "cfg.toml").train.validate();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(Config, DefaultsFollowReferenceSetup) {
  TrainConfig t;
  EXPECT_DOUBLE_EQ(t.learning_rate, 3e-4);
  EXPECT_EQ(t.batch_size, 200);
  EXPECT_EQ(t.epochs, 1000);
  EXPECT_DOUBLE_EQ(t.tau_g, 0.5);
  EXPECT_DOUBLE_EQ(t.tau_h, 1.0);
  EXPECT_DOUBLE_EQ(t.adam_beta1, 0.9);
  EXPECT_DOUBLE_EQ(t.adam_beta2, 0.999);
  EXPECT_DOUBLE_EQ(t.weight_decay, 0.0);
  EXPECT_EQ(t.eval_every, 100);
  RunSettings s = parse_run_config("[dataset]\nsource = \"synthetic\"\n");
  EXPECT_EQ(s.model.backbone.architecture, model::Architecture::kResNet34);
  EXPECT_EQ(s.model.backbone.output_dim, 512);
  EXPECT_EQ(s.model.instance.out_dim, 128);
  EXPECT_EQ(s.dataset.resize_to, (Size{224, 224}));
  EXPECT_EQ(s.strong.num_ops, 5);
  EXPECT_DOUBLE_EQ(s.weak.crop_scale_lo, 0.2);
}

TEST(Config, ParsesSections) {
  RunSettings s = parse_run_config(kSynthetic);
  EXPECT_EQ(s.dataset.source, data::Source::kSynthetic);
  EXPECT_EQ(s.dataset.synthetic.num_classes, 3);
  EXPECT_EQ(s.model.backbone.architecture, model::Architecture::kSmallConv);
  EXPECT_EQ(s.model.backbone.output_dim, 64);
  EXPECT_EQ(s.train.mode, TrainMode::kWeakStrong);
  EXPECT_EQ(s.strong.op_family, (std::vector<aug::StrongOp>{aug::StrongOp::kIdentity, aug::StrongOp::kRotate}));
  EXPECT_EQ(s.output_dir, fs::path("runs/x"));
}

TEST(Config, SnapshotRoundTrips) {
  RunSettings s = parse_run_config(kSynthetic);
  s.train.learning_rate = 1.2345e-4;
  s.weak.jitter.hue = 0.07;
  const std::string text = to_toml(s);
  EXPECT_EQ(to_toml(parse_run_config(text)), text);
  RunSettings back = parse_run_config(text);
  EXPECT_EQ(back.train.learning_rate, 1.2345e-4);
  EXPECT_EQ(back.weak.crop_ratio_hi, 4.0 / 3.0);
}

TEST(Config, UnknownKeyNamesLine) {
  const std::string msg = error_of("[train]\nepochs = 3\nlearnig_rate = 0.1\n");
  EXPECT_NE(msg.find("train.learnig_rate"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  EXPECT_NE(error_of("[trian]\n").find("trian"), std::string::npos);
}

TEST(Config, IllTypedAndInvalidValues) {
  EXPECT_NE(error_of("[train]\nepochs = \"many\"\n").find("train.epochs"), std::string::npos);
  EXPECT_FALSE(error_of("[train]\nbatch_size = 1\n").empty());
  EXPECT_FALSE(error_of("[train]\nmode = \"sideways\"\n").empty());
  EXPECT_FALSE(error_of("[aug.strong]\nops = [\"Cutout\"]\n").empty());
  EXPECT_FALSE(error_of("[train\n").empty());
}

TEST(Config, ModeNames) {
  EXPECT_EQ(parse_mode("both"), TrainMode::kFull);
  EXPECT_EQ(parse_mode("weak_weak_strong"), TrainMode::kFull);
  EXPECT_EQ(parse_mode("weak_weak"), TrainMode::kWeakWeak);
  EXPECT_EQ(parse_mode("with_instance_only"), TrainMode::kInstanceOnly);
  EXPECT_EQ(parse_mode("with_cluster_only"), TrainMode::kClusterOnly);
  EXPECT_THROW(parse_mode("strong_strong"), ConfigError);
}

class ConfigFile : public ::testing::Test {
 protected:
  void SetUp() override {
    path_ = fs::path(::testing::TempDir()) / "sacc_config_test.toml";
    std::ofstream(path_) << kSynthetic;
  }
  void TearDown() override {
    fs::remove(path_);
    unsetenv("SACC_OUTPUT_ROOT");
  }
  fs::path path_;
};

TEST_F(ConfigFile, DottedOverrides) {
  RunSettings s = load_run_config(path_, {{"train.epochs", "9"},
                                          {"train.learning_rate", "0.001"},
                                          {"dataset.synthetic.class_separation", "2.5"},
                                          {"train.mode", "both"},
                                          {"aug.weak.crop_scale", "[0.5, 1.0]"}});
  EXPECT_EQ(s.train.epochs, 9);
  EXPECT_DOUBLE_EQ(s.train.learning_rate, 0.001);
  EXPECT_DOUBLE_EQ(s.dataset.synthetic.class_separation, 2.5);
  EXPECT_EQ(s.train.mode, TrainMode::kFull);
  EXPECT_DOUBLE_EQ(s.weak.crop_scale_lo, 0.5);
  EXPECT_THROW(load_run_config(path_, {{"train.nope", "1"}}), ConfigError);
}

TEST_F(ConfigFile, OutputRootFromEnvironment) {
  setenv("SACC_OUTPUT_ROOT", "/tmp/sacc_root", 1);
  EXPECT_EQ(load_run_config(path_).output_dir, fs::path("/tmp/sacc_root/runs/x"));
  EXPECT_EQ(load_run_config(path_, {{"output_dir", "/abs/dir"}}).output_dir, fs::path("/abs/dir"));
}

TEST(Config, MissingFile) {
  EXPECT_THROW(load_run_config("/no/such/config.toml"), ConfigError);
}

}  // namespace
}  // namespace sacc
