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

#include "sacc/model.hpp"

#include <chrono>
#include <limits>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sacc/error.hpp"

namespace sacc::model {
namespace {

ModelConfig small(int clusters = 4) {
  ModelConfig cfg;
  cfg.backbone = {Architecture::kSmallConv, 64};
  cfg.cluster.num_clusters = clusters;
  return cfg;
}

std::vector<Image> random_images(int n, unsigned seed, Size size = {32, 32}) {
  std::vector<Image> out;
  for (int i = 0; i < n; ++i) out.push_back(oracle::noise_image(seed + i, size));
  return out;
}

int64_t count_params(torch::nn::Module& m) {
  int64_t total = 0;
  for (const auto& p : m.parameters()) total += p.numel();
  return total;
}

TEST(Model, ShapesPerView) {
  torch::manual_seed(0);
  SaccNet net(small(5));
  std::vector<torch::Tensor> views;
  for (unsigned v = 0; v < 3; ++v) views.push_back(images_to_tensor(random_images(8, 10 * v)));
  auto emb = forward_views(net, views);
  ASSERT_EQ(emb.size(), 3u);
  for (int v = 0; v < 3; ++v) {
    EXPECT_EQ(emb[v].z.sizes(), (std::vector<int64_t>{8, 64}));
    EXPECT_EQ(emb[v].y.sizes(), (std::vector<int64_t>{8, 128}));
    EXPECT_EQ(emb[v].c.sizes(), (std::vector<int64_t>{8, 5}));
    EXPECT_EQ(emb[v].view_index, v + 1);
  }
}

TEST(Model, UndefinedViewsAreSkipped) {
  SaccNet net(small());
  std::vector<torch::Tensor> views(3);
  views[1] = images_to_tensor(random_images(4, 1));
  auto emb = forward_views(net, views);
  EXPECT_FALSE(emb[0].y.defined());
  EXPECT_TRUE(emb[1].y.defined());
  EXPECT_FALSE(emb[2].c.defined());
}

TEST(Model, RowsOnSimplex) {
  SaccNet net(small(7));
  auto e = net->forward(images_to_tensor(random_images(6, 3)));
  EXPECT_TRUE((e.c >= 0).all().item<bool>());
  auto sums = e.c.sum(1);
  EXPECT_LT((sums - 1).abs().max().item<float>(), 1e-5f);
}

TEST(Model, IdenticalViewsGiveIdenticalEmbeddings) {
  SaccNet net(small());
  net->eval();
  torch::NoGradGuard guard;
  auto x = images_to_tensor(random_images(4, 5));
  std::vector<torch::Tensor> views{x, x.clone(), x.clone()};
  auto emb = forward_views(net, views);
  EXPECT_TRUE(torch::equal(emb[0].y, emb[1].y));
  EXPECT_TRUE(torch::equal(emb[1].c, emb[2].c));
}

TEST(Model, PerturbingSharedWeightsMovesEveryView) {
  SaccNet net(small());
  net->eval();
  torch::NoGradGuard guard;
  auto x = images_to_tensor(random_images(4, 6));
  std::vector<torch::Tensor> views{x, x, x};
  auto before = forward_views(net, views);
  net->parameters().front().add_(0.05);
  auto after = forward_views(net, views);
  EXPECT_FALSE(torch::equal(before[0].y, after[0].y));
  EXPECT_TRUE(torch::equal(after[0].y, after[1].y));
  EXPECT_TRUE(torch::equal(after[1].y, after[2].y));
}

TEST(Model, PermutationEquivariant) {
  SaccNet net(small());
  net->eval();
  torch::NoGradGuard guard;
  auto x = images_to_tensor(random_images(6, 7));
  auto perm = torch::tensor({4, 2, 0, 5, 1, 3}, torch::kLong);
  auto a = net->forward(x), b = net->forward(x.index_select(0, perm));
  EXPECT_TRUE(torch::allclose(a.y.index_select(0, perm), b.y, 1e-5, 1e-6));
  EXPECT_TRUE(torch::allclose(a.c.index_select(0, perm), b.c, 1e-5, 1e-6));
}

TEST(Model, ArgmaxRows) {
  auto p = torch::tensor({0.0f, 1.0f, 0.0f, 0.4f, 0.2f, 0.4f, 0.25f, 0.25f, 0.5f}).reshape({3, 3});
  EXPECT_EQ(argmax_rows(p), (std::vector<int>{1, 0, 2}));
}

TEST(Model, PredictionIgnoresBatching) {
  torch::manual_seed(1);
  SaccNet net(small(6));
  auto imgs = random_images(10, 8);
  auto whole = predict_clusters(net, imgs, 256);
  EXPECT_EQ(predict_clusters(net, imgs, 1), whole);
  EXPECT_EQ(predict_clusters(net, imgs, 3), whole);
  EXPECT_TRUE(net->is_training());
}

TEST(Model, SmallConvStepUnderOneSecond) {
  SaccNet net(small());
  torch::optim::Adam opt(net->parameters(), 3e-4);
  auto x = images_to_tensor(random_images(16, 9));
  net->forward(x);  // warm-up
  const auto start = std::chrono::steady_clock::now();
  opt.zero_grad();
  auto e = net->forward(x);
  (e.y.square().mean() + e.c.square().mean()).backward();
  opt.step();
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_LT(seconds, 1.0);
}

TEST(Model, NonFiniteInputNamesLayer) {
  SaccNet net(small());
  auto x = images_to_tensor(random_images(2, 10));
  x[0][0][0][0] = std::numeric_limits<float>::quiet_NaN();
  try {
    net->forward(x);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("backbone layer 0"), std::string::npos) << e.what();
  }
}

TEST(Model, ResNet34Backbone) {
  ModelConfig cfg;
  cfg.cluster.num_clusters = 10;
  SaccNet net(cfg);
  EXPECT_EQ(count_params(*net->backbone()), 21284672);
  net->eval();
  torch::NoGradGuard guard;
  auto e = net->forward(images_to_tensor(random_images(2, 11, {64, 64})));
  EXPECT_EQ(e.z.sizes(), (std::vector<int64_t>{2, 512}));
  EXPECT_EQ(e.y.sizes(), (std::vector<int64_t>{2, 128}));
}

TEST(Model, HeadsAreTwoLayerMlps) {
  SaccNet net(small(4));
  int linear = 0;
  for (const auto& m : net->modules(false)) linear += m->as<torch::nn::Linear>() != nullptr;
  EXPECT_EQ(linear, 4);
}

TEST(Model, ConfigValidation) {
  ModelConfig cfg = small(1);
  EXPECT_THROW(cfg.validate(), ConfigError);
  EXPECT_THROW(parse_architecture("vgg"), ConfigError);
  EXPECT_EQ(parse_architecture("small_conv"), Architecture::kSmallConv);
}

TEST(Model, ImagesToTensorLayout) {
  Image img(2, 3);
  img.at(1, 2, 0) = 0.75f;
  auto t = images_to_tensor(std::vector<Image>{img});
  EXPECT_EQ(t.sizes(), (std::vector<int64_t>{1, 3, 2, 3}));
  EXPECT_FLOAT_EQ(t[0][0][1][2].item<float>(), 0.75f);
  EXPECT_THROW(images_to_tensor(std::vector<Image>{Image(2, 2), Image(3, 3)}), ConfigError);
}

}  // namespace
}  // namespace sacc::model
