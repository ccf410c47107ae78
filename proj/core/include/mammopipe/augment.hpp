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
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "mammopipe/rng.hpp"
#include "mammopipe/types.hpp"

namespace mammopipe {

/// Mean intensity under the mask. Throws std::domain_error on an empty mask.
double masked_mean(const GrayImage& img, const BinaryMask& mask);
double masked_mean(const FloatImage& img, const BinaryMask& mask);

/// q-th percentile (linear interpolation) of the intensities under the mask.
double masked_percentile(const GrayImage& img, const BinaryMask& mask, double q);
double masked_percentile(const FloatImage& img, const BinaryMask& mask, double q);

struct IntensityRange {
  double min;
  double max;
};

/// v -> clip((v - from.min) / (from.max - from.min), 0, 1) * (to.max - to.min) + to.min
FloatImage rescale_intensity(const FloatImage& img, IntensityRange from, IntensityRange to);
/// Same mapping, rounded half away from zero to 8 bits.
GrayImage rescale_intensity(const GrayImage& img, IntensityRange from, IntensityRange to);

struct LabelStamp {
  std::string text;
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
  int scale = 1;
};

inline constexpr int kMinLabelSide = 64;
inline constexpr std::array<std::string_view, 4> kViewLabels = {"LMLO", "RMLO", "LCC", "RCC"};

/// Stamps a 255-valued view label ("LMLO", "RMLO", "LCC" or "RCC") rendered
/// in a 5x7 bitmap font, scaled by max(1, W/128), with its top-left corner
/// drawn uniformly from [0, 0.15W] x [0, 0.15H]. Draws, in order: label
/// index, x, y. Image must be at least 64x64.
GrayImage add_synthetic_label(const GrayImage& img, RandomSource& rng,
                              LabelStamp* stamp = nullptr);

struct ManipulationMasks {
  BinaryMask nipple;
  BinaryMask fibroglandular;
  BinaryMask fatty;
  BinaryMask background;

  static ManipulationMasks from_labels(const LabelMap& labels);
};

struct ManipulationOutcome {
  GrayImage image;
  bool applied = false;         // false on the early-return path
  bool degraded = false;        // an input condition forced the scaled-image fallback
  std::string degraded_reason;
  double scale = 1.0;
  double a_min = 0.0;
  double a_max = 0.0;
  double mu_nipple = 0.0;
  double mu_fatty = 0.0;
  double mu_fibroglandular = 0.0;
  double p_fatty = 0.0;
  double b = 0.0;
  bool background_zeroed = false;
  bool label_added = false;
  std::optional<LabelStamp> stamp;
};

/// Annotation-guided intensity manipulation.
///
///  1. I = clip(rand(0.8,1.2) * I_in, 0, 255), kept real-valued
///  2. rand(0,1) < 0.5: return I
///  3. mu_nip, mu_fat, mu_fib = masked means; p_fat = 5th percentile over fat
///  4. a_min = clip(rand(p_fat-20, p_fat+20), 0, 255)
///  5. b = 0.7 mu_fat + 0.3 mu_fib
///  6. a_min > mu_nip-5:            a_min = max(0, mu_nip-5)
///     else rand(0,1) < 0.5 and mu_nip-5 < b:
///                                  a_min = rand(max(0, mu_nip-5), mu_nip)
///  7. a_max = 98th percentile of I
///  8. rescale (a_min, a_max) -> (0, 255)
///  9. rand(0,1) < 0.5: zero background pixels
/// 10. rand(0,1) < 0.5: stamp a synthetic view label
///
/// The coin in step 6 is only drawn when the first condition fails. Images
/// under 64x64 still draw the step 10 coin but are never stamped. An empty
/// nipple, fatty or fibroglandular mask, or a_max <= a_min, returns the
/// quantized step-1 image with `degraded` set.
ManipulationOutcome manipulate(const GrayImage& img, const ManipulationMasks& masks,
                               RandomSource& rng);

enum class SourceCategory : std::uint8_t {
  original = 0,
  manipulated = 1,
  style_ims = 2,
  style_planmed = 3,
  style_hologic = 4,
};

inline constexpr std::size_t kNumSourceCategories = 5;
inline constexpr std::array<SourceCategory, kNumSourceCategories> kAllSourceCategories = {
    SourceCategory::original, SourceCategory::manipulated, SourceCategory::style_ims,
    SourceCategory::style_planmed, SourceCategory::style_hologic};

std::string_view to_string(SourceCategory c);
SourceCategory parse_source_category(std::string_view s);

/// Categorical distribution over training-image sources.
struct MixPolicy {
  std::array<double, kNumSourceCategories> weights{};

  double weight(SourceCategory c) const { return weights[static_cast<std::size_t>(c)]; }

  /// Throws std::invalid_argument unless weights are >= 0 and sum to 1 (1e-9).
  void validate() const;

  /// Original plus the three styles at 25% each.
  static MixPolicy style25();
  /// All five categories at 20% each.
  static MixPolicy combo20();
  static MixPolicy only(SourceCategory c);

  /// Category for a uniform draw u in [0,1) by inverse CDF over positive weights.
  SourceCategory pick(double u) const;

  friend bool operator==(const MixPolicy&, const MixPolicy&) = default;
};

class MixConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sequential training stream. Each call draws a category from the policy
/// (one uniform draw) and asks that category's provider for its next item;
/// providers receive a per-category running index.
template <typename Sample>
class MixStream {
 public:
  using Provider = std::function<Sample(std::uint64_t index)>;

  struct Item {
    SourceCategory category;
    std::uint64_t index;
    Sample sample;
  };

  MixStream(std::map<SourceCategory, Provider> providers, MixPolicy policy, SeededRng rng)
      : providers_(std::move(providers)), policy_(policy), rng_(rng) {
    policy_.validate();
    for (SourceCategory c : kAllSourceCategories) {
      if (policy_.weight(c) > 0.0 && !providers_.count(c)) {
        throw MixConfigError("category '" + std::string(to_string(c)) +
                             "' has positive weight but no provider");
      }
    }
  }

  Item next() {
    const SourceCategory c = policy_.pick(rng_.next_unit());
    const std::uint64_t idx = counters_[static_cast<std::size_t>(c)]++;
    return Item{c, idx, providers_.at(c)(idx)};
  }

 private:
  std::map<SourceCategory, Provider> providers_;
  MixPolicy policy_;
  SeededRng rng_;
  std::array<std::uint64_t, kNumSourceCategories> counters_{};
};

}  // namespace mammopipe
