/**
 * Copyright 2026 The mammopipe Authors
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

#include "mammopipe/augment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "mammopipe/percentile.hpp"

namespace mammopipe {

namespace {

template <typename Img>
std::vector<double> masked_values(const Img& img, const BinaryMask& mask) {
  if (!img.same_shape(mask)) throw std::invalid_argument("mask dimensions differ from image");
  std::vector<double> v;
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (mask[i]) v.push_back(static_cast<double>(img[i]));
  }
  if (v.empty()) throw std::domain_error("statistic over an empty mask");
  return v;
}

template <typename Img>
double masked_mean_impl(const Img& img, const BinaryMask& mask) {
  const auto v = masked_values(img, mask);
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

template <typename Img>
double masked_percentile_impl(const Img& img, const BinaryMask& mask, double q) {
  auto v = masked_values(img, mask);
  return percentile_inplace(v, q);
}

void check_range(IntensityRange from, IntensityRange to) {
  if (!(from.min < from.max)) throw std::invalid_argument("rescale_intensity: x_min >= x_max");
  if (!(to.min <= to.max)) throw std::invalid_argument("rescale_intensity: y_min > y_max");
}

double rescale_value(double v, IntensityRange from, IntensityRange to) {
  const double t = std::clamp((v - from.min) / (from.max - from.min), 0.0, 1.0);
  return t * (to.max - to.min) + to.min;
}

// 5x7 glyphs, one row per byte, bit 4 is the leftmost column.
struct Glyph {
  char ch;
  std::array<std::uint8_t, 7> rows;
};

constexpr std::array<Glyph, 5> kFont = {{
    {'L', {0b10000, 0b10000, 0b10000, 0b10000, 0b10000, 0b10000, 0b11111}},
    {'M', {0b10001, 0b11011, 0b10101, 0b10101, 0b10001, 0b10001, 0b10001}},
    {'O', {0b01110, 0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01110}},
    {'R', {0b11110, 0b10001, 0b10001, 0b11110, 0b10100, 0b10010, 0b10001}},
    {'C', {0b01110, 0b10001, 0b10000, 0b10000, 0b10000, 0b10001, 0b01110}},
}};

const Glyph& glyph_for(char c) {
  for (const auto& g : kFont) {
    if (g.ch == c) return g;
  }
  throw std::logic_error(std::string("no glyph for '") + c + "'");
}

constexpr int kGlyphW = 5;
constexpr int kGlyphH = 7;
constexpr int kAdvance = 6;

GrayImage quantized(const FloatImage& f, const std::optional<double>& spacing) {
  GrayImage g(f.width(), f.height(), 0);
  g.spacing_m = spacing;
  for (std::size_t i = 0; i < f.size(); ++i) g[i] = quantize_u8(f[i]);
  return g;
}

}  // namespace

double masked_mean(const GrayImage& img, const BinaryMask& mask) { return masked_mean_impl(img, mask); }
double masked_mean(const FloatImage& img, const BinaryMask& mask) { return masked_mean_impl(img, mask); }

double masked_percentile(const GrayImage& img, const BinaryMask& mask, double q) {
  return masked_percentile_impl(img, mask, q);
}
double masked_percentile(const FloatImage& img, const BinaryMask& mask, double q) {
  return masked_percentile_impl(img, mask, q);
}

FloatImage rescale_intensity(const FloatImage& img, IntensityRange from, IntensityRange to) {
  check_range(from, to);
  FloatImage out(img.width(), img.height(), 0.0);
  for (std::size_t i = 0; i < img.size(); ++i) out[i] = rescale_value(img[i], from, to);
  return out;
}

GrayImage rescale_intensity(const GrayImage& img, IntensityRange from, IntensityRange to) {
  check_range(from, to);
  GrayImage out(img.width(), img.height(), 0);
  out.spacing_m = img.spacing_m;
  for (std::size_t i = 0; i < img.size(); ++i) out[i] = quantize_u8(rescale_value(img[i], from, to));
  return out;
}

GrayImage add_synthetic_label(const GrayImage& img, RandomSource& rng, LabelStamp* stamp) {
  if (img.width() < kMinLabelSide || img.height() < kMinLabelSide) {
    throw std::invalid_argument("add_synthetic_label: image must be at least 64x64");
  }
  const double pick = rand_uniform(rng, 0.0, static_cast<double>(kViewLabels.size()));
  const auto which = std::min(static_cast<std::size_t>(pick), kViewLabels.size() - 1);
  const int x0 = static_cast<int>(std::floor(rand_uniform(rng, 0.0, 0.15 * img.width())));
  const int y0 = static_cast<int>(std::floor(rand_uniform(rng, 0.0, 0.15 * img.height())));

  LabelStamp s;
  s.text = std::string(kViewLabels[which]);
  s.scale = std::max(1, img.width() / 128);
  s.x = x0;
  s.y = y0;
  s.width = (static_cast<int>(s.text.size()) * kAdvance - 1) * s.scale;
  s.height = kGlyphH * s.scale;

  GrayImage out = img;
  for (std::size_t ci = 0; ci < s.text.size(); ++ci) {
    const Glyph& g = glyph_for(s.text[ci]);
    const int gx = x0 + static_cast<int>(ci) * kAdvance * s.scale;
    for (int row = 0; row < kGlyphH; ++row) {
      for (int col = 0; col < kGlyphW; ++col) {
        if (!((g.rows[static_cast<std::size_t>(row)] >> (kGlyphW - 1 - col)) & 1)) continue;
        for (int dy = 0; dy < s.scale; ++dy) {
          for (int dx = 0; dx < s.scale; ++dx) {
            const int px = gx + col * s.scale + dx;
            const int py = y0 + row * s.scale + dy;
            if (px < out.width() && py < out.height()) out.at(px, py) = 255;
          }
        }
      }
    }
  }
  if (stamp) *stamp = s;
  return out;
}

ManipulationMasks ManipulationMasks::from_labels(const LabelMap& labels) {
  return {mask_of(labels, ClassId::nipple), mask_of(labels, ClassId::fibroglandular),
          mask_of(labels, ClassId::fatty), mask_of(labels, ClassId::background)};
}

ManipulationOutcome manipulate(const GrayImage& img, const ManipulationMasks& masks,
                               RandomSource& rng) {
  for (const BinaryMask* m : {&masks.nipple, &masks.fibroglandular, &masks.fatty, &masks.background}) {
    if (!img.same_shape(*m)) throw std::invalid_argument("manipulate: mask dimensions differ from image");
  }

  ManipulationOutcome out;
  out.scale = rand_uniform(rng, 0.8, 1.2);
  FloatImage work(img.width(), img.height(), 0.0);
  for (std::size_t i = 0; i < img.size(); ++i) {
    work[i] = std::clamp(out.scale * img[i], 0.0, 255.0);
  }

  auto fallback = [&](std::string reason) {
    out.image = quantized(work, img.spacing_m);
    out.applied = false;
    if (!reason.empty()) {
      out.degraded = true;
      out.degraded_reason = std::move(reason);
    }
    return out;
  };

  if (rand_uniform(rng, 0.0, 1.0) < 0.5) return fallback({});

  if (count_set(masks.nipple) == 0) return fallback("empty nipple mask");
  if (count_set(masks.fatty) == 0) return fallback("empty fatty mask");
  if (count_set(masks.fibroglandular) == 0) return fallback("empty fibroglandular mask");

  out.mu_nipple = masked_mean(work, masks.nipple);
  out.mu_fatty = masked_mean(work, masks.fatty);
  out.mu_fibroglandular = masked_mean(work, masks.fibroglandular);
  out.p_fatty = masked_percentile(work, masks.fatty, 5.0);

  double a_min = std::clamp(rand_uniform(rng, out.p_fatty - 20.0, out.p_fatty + 20.0), 0.0, 255.0);
  out.b = 0.7 * out.mu_fatty + 0.3 * out.mu_fibroglandular;
  const double nip_floor = out.mu_nipple - 5.0;
  if (a_min > nip_floor) {
    a_min = std::max(0.0, nip_floor);
  } else if (rand_uniform(rng, 0.0, 1.0) < 0.5 && nip_floor < out.b) {
    a_min = rand_uniform(rng, std::max(0.0, nip_floor), out.mu_nipple);
  }
  out.a_min = a_min;

  {
    std::vector<double> all(work.data());
    out.a_max = percentile_inplace(all, 98.0);
  }
  if (!(out.a_max > out.a_min)) return fallback("a_max <= a_min");

  FloatImage res = rescale_intensity(work, {out.a_min, out.a_max}, {0.0, 255.0});
  out.applied = true;

  if (rand_uniform(rng, 0.0, 1.0) < 0.5) {
    for (std::size_t i = 0; i < res.size(); ++i) {
      if (masks.background[i]) res[i] = 0.0;
    }
    out.background_zeroed = true;
  }

  out.image = quantized(res, img.spacing_m);

  // The coin is drawn either way so the stream position does not depend on
  // image size; images too small for the font are left unstamped.
  if (rand_uniform(rng, 0.0, 1.0) < 0.5 && img.width() >= kMinLabelSide && img.height() >= kMinLabelSide) {
    LabelStamp s;
    out.image = add_synthetic_label(out.image, rng, &s);
    out.stamp = s;
    out.label_added = true;
  }
  return out;
}

std::string_view to_string(SourceCategory c) {
  switch (c) {
    case SourceCategory::original: return "original";
    case SourceCategory::manipulated: return "manipulated";
    case SourceCategory::style_ims: return "style_IMS";
    case SourceCategory::style_planmed: return "style_PLANMED";
    case SourceCategory::style_hologic: return "style_HOLOGIC";
  }
  return "unknown";
}

SourceCategory parse_source_category(std::string_view s) {
  for (SourceCategory c : kAllSourceCategories) {
    std::string a(to_string(c));
    std::string b(s);
    std::transform(a.begin(), a.end(), a.begin(), [](unsigned char ch) { return std::tolower(ch); });
    std::transform(b.begin(), b.end(), b.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (a == b) return c;
  }
  throw std::invalid_argument("unknown source category '" + std::string(s) + "'");
}

void MixPolicy::validate() const {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("mix policy weight must be >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("mix policy weights sum to " + std::to_string(sum) + ", expected 1");
  }
}

MixPolicy MixPolicy::style25() { return MixPolicy{{0.25, 0.0, 0.25, 0.25, 0.25}}; }
MixPolicy MixPolicy::combo20() { return MixPolicy{{0.2, 0.2, 0.2, 0.2, 0.2}}; }
MixPolicy MixPolicy::only(SourceCategory c) {
  MixPolicy p;
  p.weights[static_cast<std::size_t>(c)] = 1.0;
  return p;
}

SourceCategory MixPolicy::pick(double u) const {
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last_positive = i;
    cum += weights[i];
    if (u < cum) return kAllSourceCategories[i];
  }
  return kAllSourceCategories[last_positive];
}

}  // namespace mammopipe
