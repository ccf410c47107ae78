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

#include "mammopipe/style_proxy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mammopipe {

ColorImage::ColorImage(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  if (width < 0 || height < 0 || channels < 1) throw std::invalid_argument("invalid color image shape");
  if (data_.size() != static_cast<std::size_t>(width) * height * channels) {
    throw std::invalid_argument("color image data length does not match shape");
  }
}

ColorImage ColorImage::from_gray(const GrayImage& g) {
  return ColorImage(g.width(), g.height(), 1, g.data());
}

Histogram256 StyleBank::reference_histogram(const GrayImage& img, const BinaryMask& foreground) {
  const bool use_all = foreground.empty();
  if (!use_all && !img.same_shape(foreground)) {
    throw std::invalid_argument("reference_histogram: mask dimensions differ from image");
  }
  std::array<std::size_t, 256> counts{};
  std::size_t n = 0;
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (use_all || foreground[i]) {
      ++counts[img[i]];
      ++n;
    }
  }
  if (n == 0) throw std::invalid_argument("reference_histogram: no foreground pixels");
  Histogram256 h{};
  for (std::size_t v = 0; v < 256; ++v) h[v] = static_cast<double>(counts[v]) / static_cast<double>(n);
  return h;
}

const Histogram256& StyleBank::at(const std::string& style) const {
  auto it = styles.find(style);
  if (it == styles.end()) throw std::invalid_argument("style '" + style + "' not in bank");
  return it->second;
}

void StyleBank::validate() const {
  for (const auto& [name, h] : styles) {
    double sum = 0.0;
    for (double v : h) {
      if (!(v >= 0.0)) throw std::invalid_argument("style '" + name + "' has a negative bin");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      throw std::invalid_argument("style '" + name + "' histogram sums to " + std::to_string(sum));
    }
  }
}

GrayImage channel_average(const ColorImage& img) {
  GrayImage out(img.width(), img.height(), 0);
  const int c = img.channels();
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      int sum = 0;
      for (int k = 0; k < c; ++k) sum += img.at(x, y, k);
      out.at(x, y) = quantize_u8(static_cast<double>(sum) / c);
    }
  }
  return out;
}

GrayImage resize_bilinear(const GrayImage& img, int width, int height) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("resize_bilinear: bad target size");
  if (img.empty()) throw std::invalid_argument("resize_bilinear: empty source");
  if (img.same_shape(width, height)) return img;

  GrayImage out(width, height, 0);
  out.spacing_m = img.spacing_m;
  if (img.spacing_m) out.spacing_m = *img.spacing_m * img.width() / width;
  const double kx = static_cast<double>(img.width()) / width;
  const double ky = static_cast<double>(img.height()) / height;
  for (int y = 0; y < height; ++y) {
    const double sy = std::clamp((y + 0.5) * ky - 0.5, 0.0, img.height() - 1.0);
    const int y0 = static_cast<int>(sy);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double fy = sy - y0;
    for (int x = 0; x < width; ++x) {
      const double sx = std::clamp((x + 0.5) * kx - 0.5, 0.0, img.width() - 1.0);
      const int x0 = static_cast<int>(sx);
      const int x1 = std::min(x0 + 1, img.width() - 1);
      const double fx = sx - x0;
      const double top = img.at(x0, y0) * (1.0 - fx) + img.at(x1, y0) * fx;
      const double bot = img.at(x0, y1) * (1.0 - fx) + img.at(x1, y1) * fx;
      out.at(x, y) = quantize_u8(top * (1.0 - fy) + bot * fy);
    }
  }
  return out;
}

GrayImage postprocess_stylized(const ColorImage& stylized, const LabelMap& labels) {
  if (!labels.same_shape(kModelInputSize, kModelInputSize)) {
    throw std::invalid_argument("postprocess_stylized: labels are " + std::to_string(labels.width()) +
                                "x" + std::to_string(labels.height()) + ", expected 384x384");
  }
  GrayImage gray = channel_average(stylized);
  GrayImage out = resize_bilinear(gray, kModelInputSize, kModelInputSize);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (labels[i] == ClassId::background) out[i] = 0;
  }
  return out;
}

std::array<std::uint8_t, 256> histogram_match_lut(const Histogram256& source,
                                                  const Histogram256& reference) {
  std::array<double, 256> src_cdf{};
  std::array<double, 256> ref_cdf{};
  std::partial_sum(source.begin(), source.end(), src_cdf.begin());
  std::partial_sum(reference.begin(), reference.end(), ref_cdf.begin());

  std::array<std::uint8_t, 256> lut{};
  std::size_t r = 0;
  for (std::size_t v = 0; v < 256; ++v) {
    // src_cdf is non-decreasing, so r never moves backwards.
    while (r < 255 && ref_cdf[r] < src_cdf[v] - 1e-12) ++r;
    lut[v] = static_cast<std::uint8_t>(r);
  }
  return lut;
}

GrayImage histogram_match(const GrayImage& src, const Histogram256& reference,
                          const BinaryMask& foreground) {
  if (!src.same_shape(foreground)) throw std::invalid_argument("histogram_match: mask dimensions differ");
  if (count_set(foreground) == 0) throw std::invalid_argument("histogram_match: empty foreground");
  const Histogram256 source = StyleBank::reference_histogram(src, foreground);
  const auto lut = histogram_match_lut(source, reference);
  GrayImage out = src;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (foreground[i]) out[i] = lut[src[i]];
  }
  return out;
}

}  // namespace mammopipe
