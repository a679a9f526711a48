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

#include <sstream>

#include "sacc/error.hpp"

namespace sacc::model {
namespace {

namespace nn = torch::nn;

class BasicBlockImpl : public nn::Module {
 public:
  BasicBlockImpl(int in, int out, int stride)
      : conv1_(nn::Conv2dOptions(in, out, 3).stride(stride).padding(1).bias(false)),
        bn1_(out),
        conv2_(nn::Conv2dOptions(out, out, 3).padding(1).bias(false)),
        bn2_(out) {
    register_module("conv1", conv1_);
    register_module("bn1", bn1_);
    register_module("conv2", conv2_);
    register_module("bn2", bn2_);
    if (stride != 1 || in != out) {
      downsample_ = nn::Sequential(nn::Conv2d(nn::Conv2dOptions(in, out, 1).stride(stride).bias(false)),
                                   nn::BatchNorm2d(out));
      register_module("downsample", downsample_);
    }
  }

  torch::Tensor forward(const torch::Tensor& x) {
    auto out = torch::relu(bn1_(conv1_(x)));
    out = bn2_(conv2_(out));
    auto identity = downsample_ ? downsample_->forward(x) : x;
    return torch::relu(out + identity);
  }

 private:
  nn::Conv2d conv1_;
  nn::BatchNorm2d bn1_;
  nn::Conv2d conv2_;
  nn::BatchNorm2d bn2_;
  nn::Sequential downsample_{nullptr};
};
TORCH_MODULE(BasicBlock);

nn::Sequential resnet34() {
  nn::Sequential net;
  net->push_back("stem_conv", nn::Conv2d(nn::Conv2dOptions(3, 64, 7).stride(2).padding(3).bias(false)));
  net->push_back("stem_bn", nn::BatchNorm2d(64));
  net->push_back("stem_relu", nn::ReLU());
  net->push_back("stem_pool", nn::MaxPool2d(nn::MaxPool2dOptions(3).stride(2).padding(1)));
  const int widths[] = {64, 128, 256, 512};
  const int depths[] = {3, 4, 6, 3};
  int in = 64;
  for (int stage = 0; stage < 4; ++stage) {
    for (int b = 0; b < depths[stage]; ++b) {
      int stride = (b == 0 && stage > 0) ? 2 : 1;
      net->push_back("layer" + std::to_string(stage + 1) + "_" + std::to_string(b),
                     BasicBlock(in, widths[stage], stride));
      in = widths[stage];
    }
  }
  net->push_back("pool", nn::AdaptiveAvgPool2d(nn::AdaptiveAvgPool2dOptions(1)));
  net->push_back("flatten", nn::Flatten());
  return net;
}

nn::Sequential small_conv(int out_dim) {
  nn::Sequential net;
  int in = 3;
  for (int block = 0; block < 4; ++block) {
    int out = out_dim >> (3 - block);
    std::string tag = std::to_string(block + 1);
    net->push_back("conv" + tag, nn::Conv2d(nn::Conv2dOptions(in, out, 3).padding(1).bias(false)));
    net->push_back("bn" + tag, nn::BatchNorm2d(out));
    net->push_back("relu" + tag, nn::ReLU());
    net->push_back("pool" + tag, nn::MaxPool2d(nn::MaxPool2dOptions(2)));
    in = out;
  }
  net->push_back("gap", nn::AdaptiveAvgPool2d(nn::AdaptiveAvgPool2dOptions(1)));
  net->push_back("flatten", nn::Flatten());
  return net;
}

nn::Sequential mlp(int in, int hidden, int out) {
  return nn::Sequential(nn::Linear(in, hidden), nn::ReLU(), nn::Linear(hidden, out));
}

bool all_finite(const torch::Tensor& t) { return torch::isfinite(t).all().item<bool>(); }

std::string stats(const torch::Tensor& t) {
  auto finite = t.masked_select(torch::isfinite(t));
  std::ostringstream os;
  os << "shape " << t.sizes() << ", non-finite " << (t.numel() - finite.numel());
  if (finite.numel() > 0) {
    os << ", finite min " << finite.min().item<float>() << " max " << finite.max().item<float>()
       << " mean " << finite.mean().item<float>();
  }
  return os.str();
}

[[noreturn]] void report_non_finite(const std::string& where, const torch::Tensor& input,
                                    const torch::Tensor& output) {
  throw NumericalError("non-finite activations at " + where + " (input batch: " + stats(input) +
                       "; output: " + stats(output) + ")");
}

}  // namespace

std::string architecture_name(Architecture a) {
  return a == Architecture::kResNet34 ? "resnet34" : "small_conv";
}

Architecture parse_architecture(const std::string& name) {
  if (name == "resnet34") return Architecture::kResNet34;
  if (name == "small_conv") return Architecture::kSmallConv;
  throw ConfigError("unknown backbone architecture '" + name + "'");
}

void ModelConfig::validate() const {
  if (backbone.architecture == Architecture::kResNet34 && backbone.output_dim != 512) {
    throw ConfigError("resnet34 backbone output_dim must be 512");
  }
  if (backbone.architecture == Architecture::kSmallConv &&
      (backbone.output_dim < 8 || backbone.output_dim % 8 != 0)) {
    throw ConfigError("small_conv output_dim must be a positive multiple of 8");
  }
  if (instance.hidden_dim < 0 || instance.out_dim < 1) {
    throw ConfigError("instance head dims must be positive");
  }
  if (cluster.hidden_dim < 0) throw ConfigError("cluster head hidden_dim must be positive");
  if (cluster.num_clusters < 2) throw ConfigError("num_clusters must be >= 2");
}

SaccNetImpl::SaccNetImpl(const ModelConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const int d = cfg_.backbone.output_dim;
  if (cfg_.instance.hidden_dim == 0) cfg_.instance.hidden_dim = d;
  if (cfg_.cluster.hidden_dim == 0) cfg_.cluster.hidden_dim = d;
  backbone_ = register_module("backbone", cfg_.backbone.architecture == Architecture::kResNet34
                                              ? resnet34()
                                              : small_conv(d));
  instance_head_ = register_module("instance_head",
                                   mlp(d, cfg_.instance.hidden_dim, cfg_.instance.out_dim));
  cluster_head_ = register_module("cluster_head",
                                  mlp(d, cfg_.cluster.hidden_dim, cfg_.cluster.num_clusters));
}

Embeddings SaccNetImpl::forward(const torch::Tensor& images) {
  Embeddings out;
  out.z = backbone_->forward(images);
  if (!all_finite(out.z)) {
    // Re-run layer by layer to name the first offending layer.
    torch::Tensor x = images;
    auto names = backbone_->named_children();
    size_t index = 0;
    for (auto& layer : *backbone_) {
      torch::Tensor next = layer.forward(x);
      if (!all_finite(next)) {
        report_non_finite("backbone layer " + std::to_string(index) + " (" +
                              names[index].key() + ")",
                          images, next);
      }
      x = next;
      ++index;
    }
    report_non_finite("backbone", images, out.z);
  }
  out.y = instance_head_->forward(out.z);
  if (!all_finite(out.y)) report_non_finite("instance head", images, out.y);
  out.c = torch::softmax(cluster_head_->forward(out.z), 1);
  if (!all_finite(out.c)) report_non_finite("cluster head", images, out.c);
  return out;
}

torch::Tensor images_to_tensor(std::span<const Image> images) {
  if (images.empty()) throw ConfigError("images_to_tensor: empty batch");
  const int h = images.front().height();
  const int w = images.front().width();
  auto t = torch::empty({static_cast<int64_t>(images.size()), 3, h, w}, torch::kFloat32);
  auto acc = t.accessor<float, 4>();
  for (size_t n = 0; n < images.size(); ++n) {
    const Image& img = images[n];
    if (img.height() != h || img.width() != w) {
      throw ConfigError("images_to_tensor: images in a batch must share one size");
    }
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        for (int c = 0; c < 3; ++c) acc[n][c][y][x] = img.at(y, x, c);
      }
    }
  }
  return t;
}

std::vector<Embeddings> forward_views(SaccNet& net, std::span<const torch::Tensor> views) {
  std::vector<Embeddings> out(views.size());
  for (size_t j = 0; j < views.size(); ++j) {
    if (!views[j].defined()) continue;
    out[j] = net->forward(views[j]);
    out[j].view_index = static_cast<int>(j) + 1;
  }
  return out;
}

std::vector<int> argmax_rows(const torch::Tensor& probabilities) {
  auto p = probabilities.to(torch::kFloat64).contiguous();
  auto acc = p.accessor<double, 2>();
  std::vector<int> labels(p.size(0));
  for (int64_t i = 0; i < p.size(0); ++i) {
    int best = 0;
    for (int64_t m = 1; m < p.size(1); ++m) {
      if (acc[i][m] > acc[i][best]) best = static_cast<int>(m);
    }
    labels[i] = best;
  }
  return labels;
}

namespace {

template <typename F>
void for_each_eval_batch(SaccNet& net, std::span<const Image> images, int batch_size, F&& f) {
  if (batch_size < 1) throw ConfigError("evaluation batch size must be >= 1");
  const bool was_training = net->is_training();
  net->eval();
  torch::NoGradGuard no_grad;
  for (size_t start = 0; start < images.size(); start += batch_size) {
    size_t count = std::min(images.size() - start, static_cast<size_t>(batch_size));
    f(net->forward(images_to_tensor(images.subspan(start, count))));
  }
  net->train(was_training);
}

}  // namespace

std::vector<int> predict_clusters(SaccNet& net, std::span<const Image> images, int batch_size) {
  std::vector<int> labels;
  labels.reserve(images.size());
  for_each_eval_batch(net, images, batch_size, [&](const Embeddings& e) {
    auto part = argmax_rows(e.c);
    labels.insert(labels.end(), part.begin(), part.end());
  });
  return labels;
}

torch::Tensor instance_features(SaccNet& net, std::span<const Image> images, int batch_size) {
  std::vector<torch::Tensor> parts;
  for_each_eval_batch(net, images, batch_size, [&](const Embeddings& e) { parts.push_back(e.y); });
  return torch::cat(parts, 0);
}

}  // namespace sacc::model
