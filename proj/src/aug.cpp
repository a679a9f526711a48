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

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "sacc/error.hpp"

namespace sacc::aug {
namespace {

constexpr std::array<std::string_view, 14> kOpNames = {
    "AutoContrast", "Brightness", "Color",     "Contrast",   "Equalize",
    "Identity",     "Posterize",  "Rotate",    "Sharpness",  "ShearX",
    "ShearY",       "Solarize",   "TranslateX", "TranslateY"};

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

bool bernoulli(Rng& rng, double p) {
  // Always consume one draw so the stream layout does not depend on p.
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return u < p;
}

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ConfigError(std::string(name) + " must lie in [0, 1], got " + std::to_string(p));
  }
}

template <typename F>
Image map_pixels(const Image& img, F&& f) {
  Image dst = img;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < Image::kChannels; ++c) dst.at(y, x, c) = f(img.at(y, x, c), y, x, c);
    }
  }
  clamp_unit(dst);
  return dst;
}

Image blend(const Image& base, const Image& img, double factor) {
  Image dst = img;
  auto pb = base.pixels();
  auto pi = img.pixels();
  auto pd = dst.pixels();
  const auto f = static_cast<float>(factor);
  for (size_t i = 0; i < pd.size(); ++i) pd[i] = pb[i] + f * (pi[i] - pb[i]);
  clamp_unit(dst);
  return dst;
}

double mean_luma(const Image& img) {
  double acc = 0.0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      acc += luma(img.at(y, x, 0), img.at(y, x, 1), img.at(y, x, 2));
    }
  }
  return acc / (static_cast<double>(img.height()) * img.width());
}

// Inverse-mapped bilinear warp; samples landing outside the frame take `fill`.
Image warp(const Image& img, float fill,
           const std::function<std::pair<double, double>(double, double)>& source_of) {
  constexpr double kEdgeEps = 1e-6;
  const int h = img.height();
  const int w = img.width();
  Image dst(h, w, fill);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      auto [sx, sy] = source_of(x, y);
      if (sx < -kEdgeEps || sy < -kEdgeEps || sx > w - 1 + kEdgeEps || sy > h - 1 + kEdgeEps) {
        continue;
      }
      sx = std::clamp(sx, 0.0, w - 1.0);
      sy = std::clamp(sy, 0.0, h - 1.0);
      int x0 = static_cast<int>(std::floor(sx));
      int y0 = static_cast<int>(std::floor(sy));
      int x1 = std::min(x0 + 1, w - 1);
      int y1 = std::min(y0 + 1, h - 1);
      auto wx = static_cast<float>(sx - x0);
      auto wy = static_cast<float>(sy - y0);
      if (wx < kEdgeEps) wx = 0.0f;
      if (wy < kEdgeEps) wy = 0.0f;
      if (wx > 1.0f - kEdgeEps) { x0 = x1; wx = 0.0f; }
      if (wy > 1.0f - kEdgeEps) { y0 = y1; wy = 0.0f; }
      for (int c = 0; c < Image::kChannels; ++c) {
        float top = img.at(y0, x0, c) * (1 - wx) + img.at(y0, x1, c) * wx;
        float bottom = img.at(y1, x0, c) * (1 - wx) + img.at(y1, x1, c) * wx;
        dst.at(y, x, c) = top * (1 - wy) + bottom * wy;
      }
    }
  }
  clamp_unit(dst);
  return dst;
}

Image auto_contrast(const Image& img) {
  std::array<float, 3> lo{1, 1, 1};
  std::array<float, 3> hi{0, 0, 0};
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        lo[c] = std::min(lo[c], img.at(y, x, c));
        hi[c] = std::max(hi[c], img.at(y, x, c));
      }
    }
  }
  return map_pixels(img, [&](float v, int, int, int c) {
    return hi[c] > lo[c] ? (v - lo[c]) / (hi[c] - lo[c]) : v;
  });
}

int to_byte(float v) { return std::clamp(static_cast<int>(std::lround(v * 255.0f)), 0, 255); }

// Histogram equalization per channel on 256 levels, following the PIL recipe.
Image equalize(const Image& img) {
  std::array<std::array<int, 256>, 3> lut{};
  for (int c = 0; c < 3; ++c) {
    std::array<long, 256> hist{};
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) ++hist[to_byte(img.at(y, x, c))];
    }
    long total = 0;
    long last = 0;
    int nonzero = 0;
    for (long n : hist) {
      if (n > 0) {
        total += n;
        last = n;
        ++nonzero;
      }
    }
    long step = nonzero <= 1 ? 0 : (total - last) / 255;
    for (int i = 0; i < 256; ++i) lut[c][i] = i;
    if (step == 0) continue;
    long acc = step / 2;
    for (int i = 0; i < 256; ++i) {
      lut[c][i] = static_cast<int>(std::min<long>(acc / step, 255));
      acc += hist[i];
    }
  }
  return map_pixels(img, [&](float v, int, int, int c) {
    return static_cast<float>(lut[c][to_byte(v)]) / 255.0f;
  });
}

Image posterize(const Image& img, int bits) {
  const int mask = ~((1 << (8 - bits)) - 1) & 0xFF;
  return map_pixels(img, [&](float v, int, int, int) {
    int q = std::clamp(static_cast<int>(std::floor(v * 255.0f)), 0, 255);
    return static_cast<float>(q & mask) / 255.0f;
  });
}

Image solarize(const Image& img, double threshold) {
  const auto t = static_cast<float>(threshold);
  return map_pixels(img, [&](float v, int, int, int) { return v >= t ? 1.0f - v : v; });
}

// PIL's SMOOTH kernel on the interior; border pixels keep their value.
Image smoothed(const Image& img) {
  Image dst = img;
  for (int y = 1; y + 1 < img.height(); ++y) {
    for (int x = 1; x + 1 < img.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        float acc = 0.0f;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            acc += img.at(y + dy, x + dx, c) * ((dx == 0 && dy == 0) ? 5.0f : 1.0f);
          }
        }
        dst.at(y, x, c) = acc / 13.0f;
      }
    }
  }
  return dst;
}

void rgb_to_hsv(float r, float g, float b, float& h, float& s, float& v) {
  float mx = std::max({r, g, b});
  float mn = std::min({r, g, b});
  float d = mx - mn;
  v = mx;
  s = mx > 0.0f ? d / mx : 0.0f;
  if (d <= 0.0f) {
    h = 0.0f;
    return;
  }
  if (mx == r) {
    h = (g - b) / d;
  } else if (mx == g) {
    h = 2.0f + (b - r) / d;
  } else {
    h = 4.0f + (r - g) / d;
  }
  h /= 6.0f;
  if (h < 0.0f) h += 1.0f;
}

void hsv_to_rgb(float h, float s, float v, float& r, float& g, float& b) {
  float hh = h * 6.0f;
  int sector = static_cast<int>(std::floor(hh)) % 6;
  float f = hh - std::floor(hh);
  float p = v * (1 - s);
  float q = v * (1 - s * f);
  float t = v * (1 - s * (1 - f));
  switch (sector) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    default: r = v; g = p; b = q; break;
  }
}

double signed_range(double magnitude, double max_abs) {
  return -max_abs + magnitude * 2.0 * max_abs;
}

}  // namespace

void WeakAugSpec::validate() const {
  if (!(crop_scale_lo > 0.0 && crop_scale_lo <= crop_scale_hi && crop_scale_hi <= 1.0)) {
    throw ConfigError("weak crop scale must satisfy 0 < lo <= hi <= 1");
  }
  if (!(crop_ratio_lo > 0.0 && crop_ratio_lo <= crop_ratio_hi)) {
    throw ConfigError("weak crop ratio must satisfy 0 < lo <= hi");
  }
  check_probability(hflip_prob, "hflip_prob");
  check_probability(jitter_prob, "jitter_prob");
  check_probability(grayscale_prob, "grayscale_prob");
  if (jitter.brightness < 0 || jitter.contrast < 0 || jitter.saturation < 0 ||
      jitter.hue < 0 || jitter.hue > 0.5) {
    throw ConfigError("jitter strengths must be non-negative and hue <= 0.5");
  }
}

WeakAugSpec WeakAugSpec::identity() {
  WeakAugSpec spec;
  spec.crop_scale_lo = spec.crop_scale_hi = 1.0;
  spec.crop_ratio_lo = spec.crop_ratio_hi = 1.0;
  spec.hflip_prob = spec.jitter_prob = spec.grayscale_prob = 0.0;
  return spec;
}

void StrongAugSpec::validate() const {
  if (op_family.empty()) throw ConfigError("strong op_family must not be empty");
  if (num_ops < 1) throw ConfigError("strong num_ops must be >= 1");
  if (!(magnitude_lo >= 0.0 && magnitude_lo <= magnitude_hi && magnitude_hi <= 1.0)) {
    throw ConfigError("strong magnitude range must satisfy 0 <= lo <= hi <= 1");
  }
  if (ranges.posterize_bits_min < 1 || ranges.posterize_bits_max > 8 ||
      ranges.posterize_bits_min > ranges.posterize_bits_max) {
    throw ConfigError("posterize bits must satisfy 1 <= min <= max <= 8");
  }
  if (!(fill >= 0.0f && fill <= 1.0f)) throw ConfigError("strong fill must lie in [0, 1]");
}

const std::array<StrongOp, 14>& all_strong_ops() {
  static const std::array<StrongOp, 14> ops = {
      StrongOp::kAutoContrast, StrongOp::kBrightness, StrongOp::kColor,
      StrongOp::kContrast,     StrongOp::kEqualize,   StrongOp::kIdentity,
      StrongOp::kPosterize,    StrongOp::kRotate,     StrongOp::kSharpness,
      StrongOp::kShearX,       StrongOp::kShearY,     StrongOp::kSolarize,
      StrongOp::kTranslateX,   StrongOp::kTranslateY};
  return ops;
}

std::string_view op_name(StrongOp op) { return kOpNames[static_cast<size_t>(op)]; }

StrongOp parse_op(std::string_view name) {
  for (size_t i = 0; i < kOpNames.size(); ++i) {
    if (kOpNames[i] == name) return static_cast<StrongOp>(i);
  }
  throw ConfigError("unknown strong augmentation op '" + std::string(name) + "'");
}

Image adjust_brightness(const Image& img, double factor) {
  const auto f = static_cast<float>(factor);
  return map_pixels(img, [f](float v, int, int, int) { return v * f; });
}

Image adjust_contrast(const Image& img, double factor) {
  const auto mean = static_cast<float>(mean_luma(img));
  const auto f = static_cast<float>(factor);
  return map_pixels(img, [&](float v, int, int, int) { return mean + f * (v - mean); });
}

Image adjust_saturation(const Image& img, double factor) {
  return blend(to_grayscale(img), img, factor);
}

Image adjust_hue(const Image& img, double shift) {
  Image dst = img;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      float h, s, v;
      rgb_to_hsv(img.at(y, x, 0), img.at(y, x, 1), img.at(y, x, 2), h, s, v);
      h = static_cast<float>(h + shift);
      h -= std::floor(h);
      hsv_to_rgb(h, s, v, dst.at(y, x, 0), dst.at(y, x, 1), dst.at(y, x, 2));
    }
  }
  clamp_unit(dst);
  return dst;
}

Image apply_strong_op(const Image& img, StrongOp op, double magnitude,
                      const StrongRanges& ranges, float fill) {
  const double m = std::clamp(magnitude, 0.0, 1.0);
  const double enhance = ranges.enhance_lo + m * (ranges.enhance_hi - ranges.enhance_lo);
  const double cx = (img.width() - 1) / 2.0;
  const double cy = (img.height() - 1) / 2.0;
  switch (op) {
    case StrongOp::kAutoContrast:
      return auto_contrast(img);
    case StrongOp::kBrightness:
      return adjust_brightness(img, enhance);
    case StrongOp::kColor:
      return adjust_saturation(img, enhance);
    case StrongOp::kContrast:
      return adjust_contrast(img, enhance);
    case StrongOp::kEqualize:
      return equalize(img);
    case StrongOp::kIdentity:
      return img;
    case StrongOp::kPosterize: {
      int bits = static_cast<int>(std::lround(
          ranges.posterize_bits_max - m * (ranges.posterize_bits_max - ranges.posterize_bits_min)));
      return posterize(img, bits);
    }
    case StrongOp::kRotate: {
      // Positive angles turn the content counter-clockwise as displayed.
      const double theta = signed_range(m, ranges.rotate_degrees) * std::numbers::pi / 180.0;
      const double cs = std::cos(theta);
      const double sn = std::sin(theta);
      return warp(img, fill, [&](double x, double y) {
        double dx = x - cx;
        double dy = y - cy;
        return std::pair{cx + dx * cs - dy * sn, cy + dx * sn + dy * cs};
      });
    }
    case StrongOp::kSharpness:
      return blend(smoothed(img), img, enhance);
    case StrongOp::kShearX: {
      const double s = signed_range(m, ranges.shear);
      return warp(img, fill, [&](double x, double y) { return std::pair{x + s * (y - cy), y}; });
    }
    case StrongOp::kShearY: {
      const double s = signed_range(m, ranges.shear);
      return warp(img, fill, [&](double x, double y) { return std::pair{x, y + s * (x - cx)}; });
    }
    case StrongOp::kSolarize:
      return solarize(img, 1.0 - m);
    case StrongOp::kTranslateX: {
      const double dx = signed_range(m, ranges.translate) * img.width();
      return warp(img, fill, [&](double x, double y) { return std::pair{x - dx, y}; });
    }
    case StrongOp::kTranslateY: {
      const double dy = signed_range(m, ranges.translate) * img.height();
      return warp(img, fill, [&](double x, double y) { return std::pair{x, y - dy}; });
    }
  }
  throw ConfigError("unhandled strong op");
}

Image apply_weak(const Image& img, const WeakAugSpec& spec, Rng& rng, Size out) {
  spec.validate();
  const int h = img.height();
  const int w = img.width();
  if (h < 2 || w < 2) {
    throw ConfigError("apply_weak: image must be at least 2x2, got " + std::to_string(h) +
                      "x" + std::to_string(w));
  }

  // Random resized crop: up to ten rejection-sampled windows, then a
  // ratio-clamped center crop.
  const double area = static_cast<double>(h) * w;
  const double log_lo = std::log(spec.crop_ratio_lo);
  const double log_hi = std::log(spec.crop_ratio_hi);
  int top = 0, left = 0, ch = h, cw = w;
  bool found = spec.crop_scale_lo >= 1.0;
  for (int attempt = 0; attempt < 10 && !found; ++attempt) {
    double target = area * uniform(rng, spec.crop_scale_lo, spec.crop_scale_hi);
    double ratio = std::exp(log_lo == log_hi ? log_lo : uniform(rng, log_lo, log_hi));
    int tw = static_cast<int>(std::lround(std::sqrt(target * ratio)));
    int th = static_cast<int>(std::lround(std::sqrt(target / ratio)));
    if (tw > 0 && th > 0 && tw <= w && th <= h) {
      top = std::uniform_int_distribution<int>(0, h - th)(rng);
      left = std::uniform_int_distribution<int>(0, w - tw)(rng);
      ch = th;
      cw = tw;
      found = true;
    }
  }
  if (!found) {
    double in_ratio = static_cast<double>(w) / h;
    if (in_ratio < spec.crop_ratio_lo) {
      cw = w;
      ch = std::max(1, static_cast<int>(std::lround(w / spec.crop_ratio_lo)));
    } else if (in_ratio > spec.crop_ratio_hi) {
      ch = h;
      cw = std::max(1, static_cast<int>(std::lround(h * spec.crop_ratio_hi)));
    } else {
      cw = w;
      ch = h;
    }
    top = (h - ch) / 2;
    left = (w - cw) / 2;
  }
  Image view = (top == 0 && left == 0 && ch == h && cw == w) ? img : crop(img, top, left, ch, cw);
  view = resize_bilinear(view, out);

  if (bernoulli(rng, spec.hflip_prob)) view = hflip(view);

  if (bernoulli(rng, spec.jitter_prob)) {
    const auto& j = spec.jitter;
    double fb = uniform(rng, std::max(0.0, 1.0 - j.brightness), 1.0 + j.brightness);
    double fc = uniform(rng, std::max(0.0, 1.0 - j.contrast), 1.0 + j.contrast);
    double fs = uniform(rng, std::max(0.0, 1.0 - j.saturation), 1.0 + j.saturation);
    double fh = uniform(rng, -j.hue, j.hue);
    std::array<int, 4> order{0, 1, 2, 3};
    std::shuffle(order.begin(), order.end(), rng);
    for (int k : order) {
      switch (k) {
        case 0: view = adjust_brightness(view, fb); break;
        case 1: view = adjust_contrast(view, fc); break;
        case 2: view = adjust_saturation(view, fs); break;
        default: view = adjust_hue(view, fh); break;
      }
    }
  }

  if (bernoulli(rng, spec.grayscale_prob)) view = to_grayscale(view);
  clamp_unit(view);
  return view;
}

Image apply_strong(const Image& img, const StrongAugSpec& spec, Rng& rng) {
  spec.validate();
  Image view = img;
  std::uniform_int_distribution<size_t> pick(0, spec.op_family.size() - 1);
  for (int k = 0; k < spec.num_ops; ++k) {
    StrongOp op = spec.op_family[pick(rng)];
    double m = spec.magnitude_lo == spec.magnitude_hi
                   ? spec.magnitude_lo
                   : uniform(rng, spec.magnitude_lo, spec.magnitude_hi);
    view = apply_strong_op(view, op, m, spec.ranges, spec.fill);
  }
  clamp_unit(view);
  return view;
}

ViewTriple sample_views(const Image& img, const WeakAugSpec& weak, const StrongAugSpec& strong,
                        Rng& rng, Size out) {
  ViewTriple triple;
  triple.strong = apply_strong(resize_bilinear(img, out), strong, rng);
  triple.weak_a = apply_weak(img, weak, rng, out);
  triple.weak_b = apply_weak(img, weak, rng, out);
  return triple;
}

}  // namespace sacc::aug
