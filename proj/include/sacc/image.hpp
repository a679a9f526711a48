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

#ifndef SACC_IMAGE_HPP_
#define SACC_IMAGE_HPP_

#include <span>
#include <vector>

namespace sacc {

struct Size {
  int height = 0;
  int width = 0;
  bool operator==(const Size&) const = default;
};

/// Three-channel float image in HWC order with values nominally in [0, 1].
class Image {
 public:
  static constexpr int kChannels = 3;

  Image() = default;
  Image(int height, int width, float fill = 0.0f);

  /// Builds an image from interleaved pixels with 1 or 3 channels.
  /// Single-channel input is promoted to RGB by replication.
  static Image from_interleaved(int height, int width, int channels,
                                std::span<const float> pixels);

  int height() const { return height_; }
  int width() const { return width_; }
  Size size() const { return {height_, width_}; }
  bool empty() const { return pixels_.empty(); }

  float& at(int y, int x, int c) {
    return pixels_[(static_cast<size_t>(y) * width_ + x) * kChannels + c];
  }
  float at(int y, int x, int c) const {
    return pixels_[(static_cast<size_t>(y) * width_ + x) * kChannels + c];
  }

  std::span<float> pixels() { return pixels_; }
  std::span<const float> pixels() const { return pixels_; }

  bool operator==(const Image&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<float> pixels_;
};

inline float luma(float r, float g, float b) {
  return 0.299f * r + 0.587f * g + 0.114f * b;
}

/// Bilinear resampling with half-pixel centers. Same-size input is copied.
Image resize_bilinear(const Image& img, Size out);

Image crop(const Image& img, int top, int left, int height, int width);

Image hflip(const Image& img);

/// Luma replicated into all three channels.
Image to_grayscale(const Image& img);

void clamp_unit(Image& img);

bool in_unit_range(const Image& img);

double mean_abs_diff(const Image& a, const Image& b);

}  // namespace sacc

#endif  // SACC_IMAGE_HPP_
