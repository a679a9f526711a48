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

#include "sacc/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>

#include "sacc/error.hpp"
#include "sacc/image_io.hpp"

namespace sacc::data {
namespace fs = std::filesystem;
namespace {

constexpr std::array<const char*, 7> kSourceNames = {
    "folder", "synthetic", "cifar10", "cifar100_super", "stl10", "imagenet10", "imagenet_dogs"};

// Class counts of the builtin benchmarks.
int builtin_classes(Source s) {
  switch (s) {
    case Source::kCifar10: return 10;
    case Source::kCifar100Super: return 20;
    case Source::kStl10: return 10;
    case Source::kImagenet10: return 10;
    case Source::kImagenetDogs: return 15;
    default: return 0;
  }
}

std::vector<uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Channel-planar 8-bit image (CIFAR row-major, STL-10 column-major).
Image planar_image(const uint8_t* bytes, int side, bool column_major) {
  Image img(side, side);
  const int plane = side * side;
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < side; ++y) {
      for (int x = 0; x < side; ++x) {
        int offset = column_major ? x * side + y : y * side + x;
        img.at(y, x, c) = static_cast<float>(bytes[c * plane + offset]) / 255.0f;
      }
    }
  }
  return img;
}

void append(Dataset& ds, EvalLabels& labels, Image img, int label, std::string id, Size size) {
  ds.images.push_back(resize_bilinear(img, size));
  labels.labels.push_back(label);
  ds.item_ids.push_back(std::move(id));
}

// CIFAR binary records: `label_bytes` header bytes then 3x32x32 pixels.
void read_cifar_file(const fs::path& path, int label_bytes, int label_offset,
                     const std::array<int, 100>* remap, Dataset& ds, EvalLabels& labels,
                     Size size) {
  constexpr int kPixels = 3 * 32 * 32;
  const int record = label_bytes + kPixels;
  std::vector<uint8_t> bytes = read_bytes(path);
  if (bytes.empty() || bytes.size() % record != 0) {
    throw DataError(path.string() + ": size " + std::to_string(bytes.size()) +
                    " is not a multiple of the record size " + std::to_string(record));
  }
  const size_t count = bytes.size() / record;
  for (size_t i = 0; i < count; ++i) {
    const uint8_t* rec = bytes.data() + i * record;
    int label = rec[label_offset];
    if (remap != nullptr) {
      if (label >= 100) throw DataError(path.string() + ": fine label out of range");
      label = (*remap)[label];
    }
    append(ds, labels, planar_image(rec + label_bytes, 32, false), label,
           path.filename().string() + "#" + std::to_string(i), size);
  }
}

Dataset load_cifar(const DatasetSpec& spec, bool hundred) {
  Dataset ds;
  EvalLabels labels;
  if (hundred) {
    for (const char* name : {"train.bin", "test.bin"}) {
      read_cifar_file(spec.root_path / name, 2, 1, &cifar100_fine_to_coarse(), ds, labels,
                      spec.resize_to);
    }
  } else {
    for (const char* name : {"data_batch_1.bin", "data_batch_2.bin", "data_batch_3.bin",
                             "data_batch_4.bin", "data_batch_5.bin", "test_batch.bin"}) {
      read_cifar_file(spec.root_path / name, 1, 0, nullptr, ds, labels, spec.resize_to);
    }
  }
  ds.num_classes = hundred ? 20 : 10;
  ds.labels = std::move(labels);
  return ds;
}

Dataset load_stl10(const DatasetSpec& spec) {
  constexpr int kSide = 96;
  constexpr size_t kPixels = 3 * kSide * kSide;
  Dataset ds;
  EvalLabels labels;
  for (const char* split : {"train", "test"}) {
    fs::path xs = spec.root_path / (std::string(split) + "_X.bin");
    fs::path ys = spec.root_path / (std::string(split) + "_y.bin");
    std::vector<uint8_t> images = read_bytes(xs);
    std::vector<uint8_t> ids = read_bytes(ys);
    if (images.size() % kPixels != 0 || images.size() / kPixels != ids.size()) {
      throw DataError(xs.string() + ": image count does not match " + ys.string());
    }
    for (size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] < 1 || ids[i] > 10) throw DataError(ys.string() + ": label out of range");
      append(ds, labels, planar_image(images.data() + i * kPixels, kSide, true), ids[i] - 1,
             std::string(split) + "#" + std::to_string(i), spec.resize_to);
    }
  }
  ds.num_classes = 10;
  ds.labels = std::move(labels);
  return ds;
}

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp";
}

Dataset load_class_dirs(const fs::path& root, const std::vector<std::string>& classes, Size size) {
  Dataset ds;
  EvalLabels labels;
  labels.class_names = classes;
  for (size_t k = 0; k < classes.size(); ++k) {
    fs::path dir = root / classes[k];
    if (!fs::is_directory(dir)) throw DataError("class directory missing: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      append(ds, labels, read_image(f), static_cast<int>(k),
             fs::relative(f, root).generic_string(), size);
    }
  }
  if (ds.images.empty()) throw DataError("no images found under " + root.string());
  ds.num_classes = static_cast<int>(classes.size());
  ds.labels = std::move(labels);
  return ds;
}

Dataset load_folder(const DatasetSpec& spec) {
  if (!fs::is_directory(spec.root_path)) {
    throw DataError("dataset root is not a directory: " + spec.root_path.string());
  }
  std::vector<std::string> classes;
  for (const auto& entry : fs::directory_iterator(spec.root_path)) {
    if (entry.is_directory()) classes.push_back(entry.path().filename().string());
  }
  std::sort(classes.begin(), classes.end());
  if (classes.empty()) throw DataError("no class subdirectories under " + spec.root_path.string());
  return load_class_dirs(spec.root_path, classes, spec.resize_to);
}

Dataset load_synset_subset(const DatasetSpec& spec) {
  if (spec.synset_list.empty()) {
    throw ConfigError("dataset.synset_list is required for " + source_name(spec.source));
  }
  std::ifstream in(spec.synset_list);
  if (!in) throw DataError("cannot open synset list " + spec.synset_list.string());
  std::vector<std::string> classes;
  for (std::string line; std::getline(in, line);) {
    line.erase(line.find_last_not_of(" \t\r\n") + 1);
    if (!line.empty()) classes.push_back(line);
  }
  const int expected = builtin_classes(spec.source);
  if (static_cast<int>(classes.size()) != expected) {
    throw DataError("synset list for " + source_name(spec.source) + " has " +
                    std::to_string(classes.size()) + " entries, expected " +
                    std::to_string(expected));
  }
  return load_class_dirs(spec.root_path, classes, spec.resize_to);
}

struct Prototype {
  std::array<float, 3> base;
  std::array<float, 3> blob_color;
  double orientation;
  double frequency;
  std::array<std::array<double, 2>, 2> blobs;  // (y, x) as fractions of the side
};

std::array<float, 3> hsv_rgb(double h, double s, double v) {
  h = (h - std::floor(h)) * 6.0;
  int sector = static_cast<int>(h) % 6;
  double f = h - std::floor(h);
  double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
  switch (sector) {
    case 0: return {float(v), float(t), float(p)};
    case 1: return {float(q), float(v), float(p)};
    case 2: return {float(p), float(v), float(t)};
    case 3: return {float(p), float(q), float(v)};
    case 4: return {float(t), float(p), float(v)};
    default: return {float(v), float(p), float(q)};
  }
}

Image render_prototype(const Prototype& proto, Size size) {
  Image img(size.height, size.width);
  const double sigma = 0.15;
  for (int y = 0; y < size.height; ++y) {
    for (int x = 0; x < size.width; ++x) {
      double fy = (y + 0.5) / size.height;
      double fx = (x + 0.5) / size.width;
      double phase = fx * std::cos(proto.orientation) + fy * std::sin(proto.orientation);
      double grating = 0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * proto.frequency * phase);
      double blob = 0.0;
      for (const auto& b : proto.blobs) {
        double d2 = (fy - b[0]) * (fy - b[0]) + (fx - b[1]) * (fx - b[1]);
        blob = std::max(blob, std::exp(-d2 / (2 * sigma * sigma)));
      }
      for (int c = 0; c < 3; ++c) {
        double textured = proto.base[c] * (0.35 + 0.65 * grating);
        img.at(y, x, c) = static_cast<float>((1 - blob) * textured + blob * proto.blob_color[c]);
      }
    }
  }
  return img;
}

}  // namespace

std::string source_name(Source s) { return kSourceNames[static_cast<size_t>(s)]; }

Source parse_source(const std::string& name) {
  for (size_t i = 0; i < kSourceNames.size(); ++i) {
    if (name == kSourceNames[i]) return static_cast<Source>(i);
  }
  throw ConfigError("unknown dataset source '" + name + "'");
}

void SyntheticSpec::validate() const {
  if (num_classes < 2) throw ConfigError("synthetic.num_classes must be >= 2");
  if (per_class < 8) throw ConfigError("synthetic.per_class must be >= 8");
  if (image_size.height < 2 || image_size.width < 2) {
    throw ConfigError("synthetic.image_size must be at least 2x2");
  }
  if (!(class_separation > 0.0)) throw ConfigError("synthetic.class_separation must be > 0");
  if (!(noise_sigma >= 0.0)) throw ConfigError("synthetic.noise_sigma must be >= 0");
}

void DatasetSpec::validate() const {
  if (resize_to.height < 2 || resize_to.width < 2) {
    throw ConfigError("dataset.resize_to must be at least 2x2");
  }
  if (split_policy != "train_plus_test_merged") {
    throw ConfigError("dataset.split_policy must be train_plus_test_merged");
  }
  if (source == Source::kSynthetic) {
    synthetic.validate();
    return;
  }
  if (root_path.empty()) throw ConfigError("dataset.root_path is required for " + source_name(source));
  if (!fs::exists(root_path)) {
    throw ConfigError("dataset.root_path does not exist: " + root_path.string());
  }
  const int expected = builtin_classes(source);
  if (expected > 0 && num_classes != 0 && num_classes != expected) {
    throw ConfigError("dataset.num_classes for " + source_name(source) + " must be " +
                      std::to_string(expected));
  }
}

const std::array<int, 100>& cifar100_fine_to_coarse() {
  static const std::array<int, 100> table = {
      4,  1,  14, 8,  0,  6,  7,  7,  18, 3,  3,  14, 9,  18, 7,  11, 3,  9,  7,  11,
      6,  11, 5,  10, 7,  6,  13, 15, 3,  15, 0,  11, 1,  10, 12, 14, 16, 9,  11, 5,
      5,  19, 8,  8,  15, 13, 14, 17, 18, 10, 16, 4,  17, 4,  2,  0,  17, 4,  18, 17,
      10, 3,  2,  12, 12, 16, 12, 1,  9,  19, 2,  10, 0,  1,  16, 12, 9,  13, 15, 13,
      16, 19, 2,  4,  6,  19, 5,  5,  8,  19, 18, 1,  2,  15, 6,  0,  17, 8,  14, 13};
  return table;
}

Dataset load_dataset(const DatasetSpec& spec) {
  spec.validate();
  Dataset ds;
  switch (spec.source) {
    case Source::kSynthetic: {
      ds = make_synthetic(spec.synthetic);
      if (spec.synthetic.image_size != spec.resize_to) {
        for (auto& img : ds.images) img = resize_bilinear(img, spec.resize_to);
      }
      break;
    }
    case Source::kFolder: ds = load_folder(spec); break;
    case Source::kCifar10: ds = load_cifar(spec, false); break;
    case Source::kCifar100Super: ds = load_cifar(spec, true); break;
    case Source::kStl10: ds = load_stl10(spec); break;
    case Source::kImagenet10:
    case Source::kImagenetDogs: ds = load_synset_subset(spec); break;
  }
  if (spec.num_classes != 0 && spec.num_classes != ds.num_classes) {
    throw DataError("dataset has " + std::to_string(ds.num_classes) +
                    " classes but dataset.num_classes = " + std::to_string(spec.num_classes));
  }
  if (ds.labels && ds.labels->labels.size() != ds.images.size()) {
    throw DataError("label/image count mismatch");
  }
  return ds;
}

Dataset make_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int k_classes = spec.num_classes;

  std::vector<Image> prototypes;
  for (int k = 0; k < k_classes; ++k) {
    Prototype p;
    const double hue = static_cast<double>(k) / k_classes;
    p.base = hsv_rgb(hue, 0.85, 0.9);
    p.blob_color = hsv_rgb(hue + 0.5, 0.9, 1.0);
    p.orientation = std::numbers::pi * k / k_classes;
    p.frequency = 1.5 + 1.5 * (k % 3);
    for (auto& b : p.blobs) b = {0.2 + 0.6 * unit(rng), 0.2 + 0.6 * unit(rng)};
    prototypes.push_back(render_prototype(p, spec.image_size));
  }

  const float alpha = static_cast<float>(1.0 - std::exp(-spec.class_separation));
  std::normal_distribution<float> noise(0.0f, static_cast<float>(spec.noise_sigma));
  Dataset ds;
  EvalLabels labels;
  for (int k = 0; k < k_classes; ++k) {
    labels.class_names.push_back("class_" + std::to_string(k));
    for (int i = 0; i < spec.per_class; ++i) {
      Image img = prototypes[k];
      for (float& v : img.pixels()) {
        v = 0.5f + alpha * (v - 0.5f);
        if (spec.noise_sigma > 0.0) v += noise(rng);
      }
      clamp_unit(img);
      ds.images.push_back(std::move(img));
      labels.labels.push_back(k);
      ds.item_ids.push_back("synthetic/" + std::to_string(k) + "/" + std::to_string(i));
    }
  }
  ds.num_classes = k_classes;
  ds.labels = std::move(labels);
  return ds;
}

uint64_t checksum(const Image& img) {
  uint64_t h = 1469598103934665603ULL;
  for (float v : img.pixels()) {
    uint32_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int b = 0; b < 4; ++b) {
      h ^= (bits >> (8 * b)) & 0xFFu;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

nlohmann::json manifest(const Dataset& ds, const DatasetSpec& spec) {
  nlohmann::json items = nlohmann::json::array();
  uint64_t combined = 1469598103934665603ULL;
  for (size_t i = 0; i < ds.size(); ++i) {
    uint64_t c = checksum(ds.images[i]);
    combined = (combined ^ c) * 1099511628211ULL;
    nlohmann::json item = {{"id", ds.item_ids[i]}, {"checksum", c}};
    if (ds.labels) item["label"] = ds.labels->labels[i];
    items.push_back(std::move(item));
  }
  return {{"format", "sacc-manifest-v1"},
          {"source", source_name(spec.source)},
          {"root_path", spec.root_path.string()},
          {"num_classes", ds.num_classes},
          {"resize_to", {spec.resize_to.height, spec.resize_to.width}},
          {"num_items", ds.size()},
          {"checksum", combined},
          {"items", items}};
}

void write_manifest(const fs::path& path, const Dataset& ds, const DatasetSpec& spec) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write manifest " + path.string());
  out << manifest(ds, spec).dump(1) << '\n';
}

std::vector<std::vector<size_t>> make_batches(size_t num_items, int batch_size, BatchMode mode,
                                              uint64_t seed, int64_t epoch) {
  if (batch_size < 2) throw ConfigError("batch_size must be >= 2, got " + std::to_string(batch_size));
  std::vector<size_t> order(num_items);
  for (size_t i = 0; i < num_items; ++i) order[i] = i;
  if (mode == BatchMode::kTrain) {
    std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                      static_cast<uint32_t>(epoch), static_cast<uint32_t>(epoch >> 32)};
    std::mt19937_64 rng(seq);
    std::shuffle(order.begin(), order.end(), rng);
  }
  std::vector<std::vector<size_t>> batches;
  const auto bs = static_cast<size_t>(batch_size);
  for (size_t start = 0; start < num_items; start += bs) {
    size_t end = std::min(num_items, start + bs);
    if (mode == BatchMode::kTrain && end - start < bs) break;
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

std::vector<Image> gather(std::span<const Image> images, std::span<const size_t> indices) {
  std::vector<Image> out;
  out.reserve(indices.size());
  for (size_t i : indices) out.push_back(images[i]);
  return out;
}

}  // namespace sacc::data
