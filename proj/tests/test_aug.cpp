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

#include "sacc/aug.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sacc/error.hpp"

namespace sacc::aug {
namespace {

Image from_values(int h, int w, std::initializer_list<float> gray) {
  std::vector<float> v(gray);
  return Image::from_interleaved(h, w, 1, v);
}

WeakAugSpec flip_only() {
  WeakAugSpec s = WeakAugSpec::identity();
  s.hflip_prob = 1.0;
  return s;
}

StrongAugSpec only(StrongOp op, double magnitude) {
  StrongAugSpec s;
  s.op_family = {op};
  s.magnitude_lo = s.magnitude_hi = magnitude;
  return s;
}

TEST(Weak, ForcedFlipMirrors) {
  Image img = from_values(4, 4, {0.0f, 0.1f, 0.2f, 0.3f, 0.4f, 0.5f, 0.6f, 0.7f,
                                 0.8f, 0.9f, 1.0f, 0.05f, 0.15f, 0.25f, 0.35f, 0.45f});
  Rng rng(1);
  Image out = apply_weak(img, flip_only(), rng, img.size());
  EXPECT_EQ(out, hflip(img));
  EXPECT_FLOAT_EQ(out.at(0, 0, 0), 0.3f);
}

TEST(Weak, IdentitySpecIsNoOp) {
  Image img = oracle::smooth_image(3, kViewSize);
  Rng rng(2);
  EXPECT_EQ(apply_weak(img, WeakAugSpec::identity(), rng), img);
}

TEST(Weak, DeterministicForSeed) {
  Image img = oracle::noise_image(4, {8, 8});
  Rng a(42), b(42);
  Image x = apply_weak(img, WeakAugSpec{}, a), y = apply_weak(img, WeakAugSpec{}, b);
  EXPECT_EQ(x, y);
  EXPECT_EQ(x.size(), kViewSize);
}

TEST(Weak, RejectsTinyImages) {
  Rng rng(0);
  EXPECT_THROW(apply_weak(Image(1, 5), WeakAugSpec{}, rng), ConfigError);
}

TEST(Weak, SpecValidation) {
  WeakAugSpec s;
  s.crop_scale_lo = 0.0;
  EXPECT_THROW(s.validate(), ConfigError);
  s = {};
  s.crop_scale_lo = 0.8;
  s.crop_scale_hi = 0.5;
  EXPECT_THROW(s.validate(), ConfigError);
  s = {};
  s.grayscale_prob = 1.5;
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(Strong, IdentityLeavesInput) {
  Image img = oracle::noise_image(5, {16, 16});
  for (double m : {0.0, 0.3, 1.0}) {
    Rng rng(3);
    EXPECT_EQ(apply_strong(img, only(StrongOp::kIdentity, m), rng), img);
  }
}

TEST(Strong, MaximalSolarizeInverts) {
  Image img = oracle::noise_image(6, {8, 8});
  Image out = apply_strong_op(img, StrongOp::kSolarize, 1.0, {}, 0.5f);
  for (size_t i = 0; i < img.pixels().size(); ++i) {
    EXPECT_FLOAT_EQ(out.pixels()[i], 1.0f - img.pixels()[i]);
  }
}

TEST(Strong, QuarterTurnOfTwoByTwo) {
  const float a = 0.1f, b = 0.2f, c = 0.3f, d = 0.4f;
  Image img = from_values(2, 2, {a, b, c, d});
  StrongRanges r;
  r.rotate_degrees = 90.0;
  Image out = apply_strong_op(img, StrongOp::kRotate, 1.0, r, 0.5f);
  EXPECT_NEAR(out.at(0, 0, 0), b, 1e-6);
  EXPECT_NEAR(out.at(0, 1, 0), d, 1e-6);
  EXPECT_NEAR(out.at(1, 0, 0), a, 1e-6);
  EXPECT_NEAR(out.at(1, 1, 0), c, 1e-6);
}

TEST(Strong, QuarterTurnFillsExposedCorners) {
  Image img = from_values(2, 4, {0.1f, 0.2f, 0.3f, 0.4f, 0.6f, 0.7f, 0.8f, 0.9f});
  StrongRanges r;
  r.rotate_degrees = 90.0;
  Image out = apply_strong_op(img, StrongOp::kRotate, 1.0, r, 0.5f);
  EXPECT_FLOAT_EQ(out.at(0, 0, 0), 0.5f);
  EXPECT_FLOAT_EQ(out.at(1, 3, 0), 0.5f);
  EXPECT_NEAR(out.at(0, 1, 0), 0.3f, 1e-6);
}

TEST(Strong, NeutralMagnitudesAreNoOps) {
  Image img = oracle::smooth_image(7, {12, 12});
  for (StrongOp op : {StrongOp::kBrightness, StrongOp::kColor, StrongOp::kContrast,
                      StrongOp::kSharpness, StrongOp::kRotate, StrongOp::kShearX,
                      StrongOp::kShearY, StrongOp::kTranslateX, StrongOp::kTranslateY}) {
    Image out = apply_strong_op(img, op, 0.5, {}, 0.5f);
    EXPECT_LT(mean_abs_diff(out, img), 1e-6) << op_name(op);
  }
}

TEST(Strong, TranslateShiftsWholePixels) {
  Image img = oracle::noise_image(8, {10, 10});
  StrongRanges r;
  r.translate = 0.2;  // two pixels at m = 1
  Image out = apply_strong_op(img, StrongOp::kTranslateX, 1.0, r, 0.5f);
  EXPECT_FLOAT_EQ(out.at(4, 5, 1), img.at(4, 3, 1));
  EXPECT_FLOAT_EQ(out.at(4, 0, 1), 0.5f);
}

TEST(Strong, PosterizeKeepsTopBits) {
  Image img = from_values(1, 2, {200.0f / 255.0f, 37.0f / 255.0f});
  Image out = apply_strong_op(img, StrongOp::kPosterize, 1.0, {}, 0.5f);
  EXPECT_NEAR(out.at(0, 0, 0), 192.0f / 255.0f, 1e-6);
  EXPECT_NEAR(out.at(0, 1, 0), 32.0f / 255.0f, 1e-6);
}

TEST(Strong, UnknownOpRejected) {
  EXPECT_THROW(parse_op("Cutout"), ConfigError);
  for (StrongOp op : all_strong_ops()) EXPECT_EQ(parse_op(op_name(op)), op);
  EXPECT_EQ(all_strong_ops().size(), 14u);
}

TEST(Strong, DefaultFamilyIsAllFourteen) {
  StrongAugSpec s;
  EXPECT_EQ(s.op_family.size(), 14u);
  EXPECT_EQ(s.num_ops, 5);
  s.num_ops = 0;
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(Strong, EveryOpDeterministicAndInRange) {
  Image img = oracle::noise_image(9, {16, 16});
  for (StrongOp op : all_strong_ops()) {
    for (double m : {0.0, 0.25, 0.5, 0.8, 1.0}) {
      Image a = apply_strong_op(img, op, m, {}, 0.5f);
      EXPECT_EQ(a, apply_strong_op(img, op, m, {}, 0.5f)) << op_name(op);
      EXPECT_TRUE(in_unit_range(a)) << op_name(op) << " m=" << m;
    }
  }
}

TEST(Views, IdentitySpecsGiveThreeResizedCopies) {
  Image img = oracle::smooth_image(10, {40, 30});
  StrongAugSpec strong = only(StrongOp::kIdentity, 0.5);
  Rng rng(0);
  ViewTriple t = sample_views(img, WeakAugSpec::identity(), strong, rng);
  Image resized = resize_bilinear(img, kViewSize);
  EXPECT_EQ(t.strong, resized);
  EXPECT_EQ(t.weak_a, resized);
  EXPECT_EQ(t.weak_b, resized);
}

TEST(Views, ShapeAndDeterminism) {
  for (Size in : {Size{7, 9}, Size{32, 32}, Size{300, 260}}) {
    Image img = oracle::smooth_image(11, in);
    Rng a(5), b(5);
    ViewTriple x = sample_views(img, {}, {}, a), y = sample_views(img, {}, {}, b);
    for (const Image* v : {&x.strong, &x.weak_a, &x.weak_b}) {
      EXPECT_EQ(v->size(), kViewSize);
      EXPECT_TRUE(in_unit_range(*v));
    }
    EXPECT_EQ(x.strong, y.strong);
    EXPECT_EQ(x.weak_a, y.weak_a);
    EXPECT_EQ(x.weak_b, y.weak_b);
  }
}

TEST(Views, WeakDrawsAreIndependent) {
  Image img = oracle::smooth_image(12, {48, 48});
  Rng rng(6);
  int collisions = 0;
  for (int i = 0; i < 100; ++i) {
    ViewTriple t = sample_views(img, {}, {}, rng, {32, 32});
    collisions += t.weak_a == t.weak_b;
  }
  EXPECT_EQ(collisions, 0);
}

TEST(Jitter, NeutralFactors) {
  Image img = oracle::smooth_image(13, {8, 8});
  EXPECT_LT(mean_abs_diff(adjust_brightness(img, 1.0), img), 1e-7);
  EXPECT_LT(mean_abs_diff(adjust_contrast(img, 1.0), img), 1e-6);
  EXPECT_LT(mean_abs_diff(adjust_saturation(img, 1.0), img), 1e-6);
  EXPECT_LT(mean_abs_diff(adjust_hue(img, 0.0), img), 1e-5);
  Image gray = adjust_saturation(img, 0.0);
  EXPECT_FLOAT_EQ(gray.at(2, 3, 0), gray.at(2, 3, 2));
}

}  // namespace
}  // namespace sacc::aug
