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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mammopipe/rasterize.hpp"
#include "mammopipe/types.hpp"

namespace mammopipe {

struct ClassCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }
  /// Class absent from both prediction and ground truth.
  bool vacuous() const { return tp + fp + fn == 0; }
  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

/// One-vs-rest pixel counts for every class.
struct ConfusionCounts {
  std::array<ClassCounts, kNumClasses> per_class{};
  const ClassCounts& operator[](ClassId c) const { return per_class[index_of(c)]; }
};

ConfusionCounts confusion(const LabelMap& pred, const LabelMap& gt);

// Degenerate denominators: a vacuous class scores 1, any other 0/0 scores 0.
double precision(const ClassCounts& c);
double recall(const ClassCounts& c);
double accuracy(const ClassCounts& c);
double dice(const ClassCounts& c);
double iou(const ClassCounts& c);

enum class Metric : std::uint8_t { precision, recall, accuracy, dice, iou, hausdorff };
inline constexpr std::size_t kNumMetrics = 6;
inline constexpr std::array<Metric, kNumMetrics> kAllMetrics = {
    Metric::precision, Metric::recall, Metric::accuracy,
    Metric::dice,      Metric::iou,    Metric::hausdorff};

std::string_view to_string(Metric m);
/// Display name used in report tables ("Precision", ..., "Hausdorff").
std::string_view display_name(Metric m);
Metric parse_metric(std::string_view s);

inline constexpr double kDefaultSpacingM = 0.0001;

/// max over a in A of min over b in B of the Euclidean pixel distance.
/// Both sets must be non-empty.
double directed_hausdorff_px(std::span<const PixelCoord> from, std::span<const PixelCoord> to);

/// Mean of the two directed distances, in meters. nullopt when either
/// contour is empty. Throws std::invalid_argument unless spacing_m > 0.
std::optional<double> hausdorff_avg(const ContourSet& pred, const ContourSet& gt, double spacing_m);

struct ClassScores {
  /// Indexed by Metric. nullopt means undefined (Hausdorff with an empty contour).
  std::array<std::optional<double>, kNumMetrics> values{};
  /// Absent from both maps: overlap metrics hold 1 but are left out of averages.
  bool vacuous = false;

  std::optional<double> get(Metric m) const { return values[static_cast<std::size_t>(m)]; }
  /// Value that enters dataset averages, if any.
  std::optional<double> averaged(Metric m) const;
};

struct MetricRecord {
  std::string image_id;
  double spacing_m = kDefaultSpacingM;
  bool spacing_assumed = false;
  std::array<ClassScores, kNumClasses> classes{};

  const ClassScores& operator[](ClassId c) const { return classes[index_of(c)]; }
  ClassScores& operator[](ClassId c) { return classes[index_of(c)]; }
  /// Mean over the four structures of the values that enter averages.
  std::optional<double> foreground_mean(Metric m) const;
};

/// All six metrics for every class of one prediction/ground-truth pair.
/// A missing spacing uses kDefaultSpacingM and sets spacing_assumed.
MetricRecord evaluate_pair(std::string image_id, const LabelMap& pred, const LabelMap& gt,
                           std::optional<double> spacing_m);

struct SummaryCell {
  std::optional<double> mean;
  std::size_t count = 0;     // values averaged
  std::size_t excluded = 0;  // vacuous or undefined per-image values
};

struct Summary {
  std::size_t images = 0;
  std::array<std::array<SummaryCell, kNumClasses>, kNumMetrics> cells{};

  const SummaryCell& cell(Metric m, ClassId c) const {
    return cells[static_cast<std::size_t>(m)][index_of(c)];
  }
  /// Arithmetic mean of the available structure means, background excluded.
  std::optional<double> mean_column(Metric m) const;
};

/// Per-metric, per-class means across images. Throws on empty input.
Summary aggregate(std::span<const MetricRecord> records);

}  // namespace mammopipe
