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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mammopipe/types.hpp"

namespace mammopipe {

/// Per-pixel class probabilities, stored planar: plane c holds P(class c).
class ProbMap {
 public:
  ProbMap() = default;
  ProbMap(int width, int height);
  ProbMap(int width, int height, std::vector<float> planar);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixels() const { return static_cast<std::size_t>(width_) * height_; }

  float& at(int x, int y, std::size_t cls) {
    return data_[cls * pixels() + static_cast<std::size_t>(y) * width_ + x];
  }
  float at(int x, int y, std::size_t cls) const {
    return data_[cls * pixels() + static_cast<std::size_t>(y) * width_ + x];
  }
  const std::vector<float>& planar() const { return data_; }

  /// Throws std::invalid_argument unless entries are >= 0 and each pixel
  /// sums to 1 within `tol`.
  void validate(double tol = 1e-6) const;

  static ProbMap one_hot(const LabelMap& labels);

  friend bool operator==(const ProbMap&, const ProbMap&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

enum class TtaKind { identity, hflip, vflip, intensity_shift };

struct TtaTransform {
  TtaKind kind = TtaKind::identity;
  double delta = 0.0;  // intensity_shift only

  /// "identity", "hflip", "vflip" or "intensity_shift(<delta>)".
  static TtaTransform parse(std::string_view tag);
  std::string tag() const;
};

/// Maps a prediction made on a transformed input back to the reference frame.
ProbMap align(const ProbMap& prob, const TtaTransform& t);

enum class UncertaintyStatistic {
  /// Entropy of the mean probability vector divided by ln(5).
  normalized_entropy,
  /// Per-pixel standard deviation (population) of the max-class probability
  /// across maps, scaled by 2 so the bound is 1.
  max_prob_std,
};

UncertaintyStatistic parse_statistic(std::string_view s);

/// Values in [0,1]. Throws std::invalid_argument on an empty list or mixed
/// dimensions.
FloatImage uncertainty_map(std::span<const ProbMap> aligned,
                           UncertaintyStatistic stat = UncertaintyStatistic::normalized_entropy);

/// Interleaved RGB8.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;
};

std::array<std::uint8_t, 3> hot_color(double u);

/// Black -> red -> yellow -> white. Out-of-range values are clipped and
/// counted in `clipped` when provided.
RgbImage render_hot(const FloatImage& u, std::size_t* clipped = nullptr);

}  // namespace mammopipe
