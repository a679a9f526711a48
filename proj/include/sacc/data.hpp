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

#ifndef SACC_DATA_HPP_
#define SACC_DATA_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "sacc/image.hpp"

namespace sacc::data {

enum class Source {
  kFolder,
  kSynthetic,
  kCifar10,
  kCifar100Super,
  kStl10,
  kImagenet10,
  kImagenetDogs,
};

std::string source_name(Source s);
Source parse_source(const std::string& name);

/// Classes are drawn from distinct color/texture prototypes. Larger
/// class_separation pulls every prototype further from a shared mid-gray.
struct SyntheticSpec {
  int num_classes = 4;
  int per_class = 64;
  Size image_size{32, 32};
  double class_separation = 3.0;
  double noise_sigma = 0.05;
  uint64_t rng_seed = 0;

  void validate() const;
};

struct DatasetSpec {
  Source source = Source::kSynthetic;
  std::filesystem::path root_path;
  int num_classes = 0;  // 0: take from the source
  Size resize_to{224, 224};
  // Train and test splits are always merged.
  std::string split_policy = "train_plus_test_merged";
  // ImageNet subsets: text file with one synset directory name per line.
  std::filesystem::path synset_list;
  SyntheticSpec synthetic;

  void validate() const;
};

/// Ground truth kept apart from the images so the trainer never sees it.
struct EvalLabels {
  std::vector<int> labels;
  std::vector<std::string> class_names;
};

struct Dataset {
  std::vector<Image> images;
  std::vector<std::string> item_ids;
  int num_classes = 0;
  std::optional<EvalLabels> labels;

  size_t size() const { return images.size(); }
};

/// Published CIFAR-100 fine -> super-class table.
const std::array<int, 100>& cifar100_fine_to_coarse();

/// Loads and resizes every item to spec.resize_to in a deterministic order.
Dataset load_dataset(const DatasetSpec& spec);

/// per_class * num_classes images at spec.image_size, class-major order.
Dataset make_synthetic(const SyntheticSpec& spec);

/// FNV-1a over the raw pixel bytes.
uint64_t checksum(const Image& img);

nlohmann::json manifest(const Dataset& ds, const DatasetSpec& spec);
void write_manifest(const std::filesystem::path& path, const Dataset& ds, const DatasetSpec& spec);

enum class BatchMode { kTrain, kEval };

/// Index batches for one epoch. Training shuffles with a stream derived from
/// (seed, epoch) and drops the ragged tail; evaluation keeps input order and
/// the tail.
std::vector<std::vector<size_t>> make_batches(size_t num_items, int batch_size, BatchMode mode,
                                              uint64_t seed, int64_t epoch);

std::vector<Image> gather(std::span<const Image> images, std::span<const size_t> indices);

}  // namespace sacc::data

#endif  // SACC_DATA_HPP_
