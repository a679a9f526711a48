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

#ifndef SACC_AUG_HPP_
#define SACC_AUG_HPP_

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "sacc/image.hpp"

namespace sacc::aug {

/// Every stochastic transform draws from an explicitly passed engine.
using Rng = std::mt19937_64;

inline constexpr Size kViewSize{224, 224};

struct JitterStrength {
  double brightness = 0.4;
  double contrast = 0.4;
  double saturation = 0.4;
  double hue = 0.1;
};

/// Composed weak pipeline: random resized crop (always), horizontal flip,
/// color jitter and grayscale, each gated by its own probability.
struct WeakAugSpec {
  double crop_scale_lo = 0.2;
  double crop_scale_hi = 1.0;
  double crop_ratio_lo = 3.0 / 4.0;
  double crop_ratio_hi = 4.0 / 3.0;
  double hflip_prob = 0.5;
  JitterStrength jitter;
  double jitter_prob = 0.8;
  double grayscale_prob = 0.2;
  uint64_t rng_seed = 0;

  void validate() const;

  /// Full-frame crop and every probability zero.
  static WeakAugSpec identity();
};

enum class StrongOp {
  kAutoContrast,
  kBrightness,
  kColor,
  kContrast,
  kEqualize,
  kIdentity,
  kPosterize,
  kRotate,
  kSharpness,
  kShearX,
  kShearY,
  kSolarize,
  kTranslateX,
  kTranslateY,
};

const std::array<StrongOp, 14>& all_strong_ops();
std::string_view op_name(StrongOp op);
/// Throws ConfigError for identifiers outside the fourteen-op family.
StrongOp parse_op(std::string_view name);

/// Physical ranges that a normalized magnitude m in [0, 1] maps onto.
/// Signed ops map linearly from -max (m = 0) to +max (m = 1); enhancement
/// factors map from enhance_lo to enhance_hi, so m = 0.5 leaves them neutral.
struct StrongRanges {
  double rotate_degrees = 30.0;
  double shear = 0.3;
  double translate = 0.3;  // fraction of the image side
  double enhance_lo = 0.1;
  double enhance_hi = 1.9;
  int posterize_bits_max = 8;  // at m = 0
  int posterize_bits_min = 4;  // at m = 1
};

struct StrongAugSpec {
  std::vector<StrongOp> op_family{all_strong_ops().begin(), all_strong_ops().end()};
  int num_ops = 5;
  double magnitude_lo = 0.0;
  double magnitude_hi = 1.0;
  StrongRanges ranges;
  float fill = 0.5f;
  uint64_t rng_seed = 0;

  void validate() const;
};

struct ViewTriple {
  Image strong;  // view 1
  Image weak_a;  // view 2
  Image weak_b;  // view 3
};

/// Applies a single strong op at a fixed normalized magnitude.
Image apply_strong_op(const Image& img, StrongOp op, double magnitude,
                      const StrongRanges& ranges, float fill);

Image apply_weak(const Image& img, const WeakAugSpec& spec, Rng& rng,
                 Size out = kViewSize);

/// Samples num_ops ops with replacement and applies them in order at the
/// input resolution.
Image apply_strong(const Image& img, const StrongAugSpec& spec, Rng& rng);

/// One strong view of the resized image plus two independent weak draws.
ViewTriple sample_views(const Image& img, const WeakAugSpec& weak,
                        const StrongAugSpec& strong, Rng& rng,
                        Size out = kViewSize);

// Building blocks, exposed for tests and the preview tool.
Image adjust_brightness(const Image& img, double factor);
Image adjust_contrast(const Image& img, double factor);
Image adjust_saturation(const Image& img, double factor);
Image adjust_hue(const Image& img, double shift);

}  // namespace sacc::aug

#endif  // SACC_AUG_HPP_
