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

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mammopipe/types.hpp"

namespace mammopipe {

/// Interleaved 8-bit image with 1 or more channels, as produced by an
/// external stylizer.
class ColorImage {
 public:
  ColorImage() = default;
  ColorImage(int width, int height, int channels, std::vector<std::uint8_t> data);

  static ColorImage from_gray(const GrayImage& g);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::uint8_t at(int x, int y, int c) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  const std::vector<std::uint8_t>& data() const { return data_; }

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<std::uint8_t> data_;
};

inline constexpr int kModelInputSize = 384;

using Histogram256 = std::array<double, 256>;

/// Per-style normalized reference histograms (IMS, PLANMED, HOLOGIC, ...).
struct StyleBank {
  std::map<std::string, Histogram256> styles;

  /// Normalized foreground histogram of a representative image. Pixels where
  /// `foreground` is zero are ignored; pass an empty mask to use all pixels.
  static Histogram256 reference_histogram(const GrayImage& img, const BinaryMask& foreground);

  const Histogram256& at(const std::string& style) const;
  /// Throws std::invalid_argument unless every histogram is non-negative
  /// and sums to 1 within 1e-6.
  void validate() const;
};

/// Per-pixel channel mean, rounded half away from zero.
GrayImage channel_average(const ColorImage& img);

/// Bilinear resampling with half-pixel centres; equal sizes copy exactly.
GrayImage resize_bilinear(const GrayImage& img, int width, int height);

/// Collapses to one channel, resizes to 384x384 and zeroes every pixel the
/// labels mark as background. Labels must be 384x384.
GrayImage postprocess_stylized(const ColorImage& stylized, const LabelMap& labels);

/// Monotone lookup table mapping each source level v to the smallest
/// reference level r with ref_cdf(r) >= src_cdf(v).
std::array<std::uint8_t, 256> histogram_match_lut(const Histogram256& source,
                                                  const Histogram256& reference);

/// Deterministic stand-in for neural stylization: remaps foreground
/// intensities so their CDF follows the reference; background untouched.
/// Throws std::invalid_argument on an empty foreground.
GrayImage histogram_match(const GrayImage& src, const Histogram256& reference,
                          const BinaryMask& foreground);

}  // namespace mammopipe
