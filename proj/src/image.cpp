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

#include "sacc/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sacc/error.hpp"

namespace sacc {

Image::Image(int height, int width, float fill)
    : height_(height), width_(width) {
  if (height <= 0 || width <= 0) {
    throw ConfigError("image dimensions must be positive, got " +
                      std::to_string(height) + "x" + std::to_string(width));
  }
  pixels_.assign(static_cast<size_t>(height) * width * kChannels, fill);
}

Image Image::from_interleaved(int height, int width, int channels,
                              std::span<const float> pixels) {
  if (channels != 1 && channels != 3) {
    throw ConfigError("unsupported channel count " + std::to_string(channels));
  }
  Image img(height, width);
  if (pixels.size() != static_cast<size_t>(height) * width * channels) {
    throw ConfigError("pixel buffer size does not match " +
                      std::to_string(height) + "x" + std::to_string(width) +
                      "x" + std::to_string(channels));
  }
  if (channels == 3) {
    std::copy(pixels.begin(), pixels.end(), img.pixels_.begin());
  } else {
    for (size_t i = 0; i < pixels.size(); ++i) {
      for (int c = 0; c < kChannels; ++c) img.pixels_[i * kChannels + c] = pixels[i];
    }
  }
  return img;
}

Image resize_bilinear(const Image& img, Size out) {
  if (img.size() == out) return img;
  Image dst(out.height, out.width);
  const double sy = static_cast<double>(img.height()) / out.height;
  const double sx = static_cast<double>(img.width()) / out.width;
  for (int y = 0; y < out.height; ++y) {
    double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height() - 1.0);
    int y0 = static_cast<int>(fy);
    int y1 = std::min(y0 + 1, img.height() - 1);
    float wy = static_cast<float>(fy - y0);
    for (int x = 0; x < out.width; ++x) {
      double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width() - 1.0);
      int x0 = static_cast<int>(fx);
      int x1 = std::min(x0 + 1, img.width() - 1);
      float wx = static_cast<float>(fx - x0);
      for (int c = 0; c < Image::kChannels; ++c) {
        float top = img.at(y0, x0, c) * (1 - wx) + img.at(y0, x1, c) * wx;
        float bottom = img.at(y1, x0, c) * (1 - wx) + img.at(y1, x1, c) * wx;
        dst.at(y, x, c) = top * (1 - wy) + bottom * wy;
      }
    }
  }
  return dst;
}

Image crop(const Image& img, int top, int left, int height, int width) {
  if (top < 0 || left < 0 || height <= 0 || width <= 0 ||
      top + height > img.height() || left + width > img.width()) {
    throw ConfigError("crop window out of bounds");
  }
  Image dst(height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < Image::kChannels; ++c) {
        dst.at(y, x, c) = img.at(top + y, left + x, c);
      }
    }
  }
  return dst;
}

Image hflip(const Image& img) {
  Image dst(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < Image::kChannels; ++c) {
        dst.at(y, img.width() - 1 - x, c) = img.at(y, x, c);
      }
    }
  }
  return dst;
}

Image to_grayscale(const Image& img) {
  Image dst(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      float v = luma(img.at(y, x, 0), img.at(y, x, 1), img.at(y, x, 2));
      for (int c = 0; c < Image::kChannels; ++c) dst.at(y, x, c) = v;
    }
  }
  return dst;
}

void clamp_unit(Image& img) {
  for (float& v : img.pixels()) {
    v = std::isfinite(v) ? std::clamp(v, 0.0f, 1.0f) : 0.0f;
  }
}

bool in_unit_range(const Image& img) {
  return std::all_of(img.pixels().begin(), img.pixels().end(), [](float v) {
    return std::isfinite(v) && v >= 0.0f && v <= 1.0f;
  });
}

double mean_abs_diff(const Image& a, const Image& b) {
  if (a.size() != b.size()) throw ConfigError("mean_abs_diff: size mismatch");
  double acc = 0.0;
  auto pa = a.pixels();
  auto pb = b.pixels();
  for (size_t i = 0; i < pa.size(); ++i) acc += std::abs(pa[i] - pb[i]);
  return pa.empty() ? 0.0 : acc / static_cast<double>(pa.size());
}

}  // namespace sacc
