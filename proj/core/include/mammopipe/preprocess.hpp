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
#include <string_view>
#include <vector>

#include "mammopipe/types.hpp"

namespace mammopipe {

/// Raw detector intensities of unbounded range, with optional DICOM-style
/// window center/width.
struct RawImage : Grid<double> {
  using Grid::Grid;
  std::optional<double> window_center;
  std::optional<double> window_width;
};

struct NormalizeResult {
  RawImage image;  // values in [0,1]
  bool degenerate = false;
};

/// Maps the lo_pct percentile to 0 and hi_pct to 1, clipping outside.
/// A zero-width window (constant image) yields all zeros with degenerate set.
NormalizeResult percentile_normalize(const RawImage& img, double lo_pct = 2.0,
                                     double hi_pct = 98.0);

struct WindowBounds {
  double x_min;
  double x_max;
};

/// (c - floor(w/2) - floor(0.25w), c + floor(w/2))
WindowBounds window_bounds(double center, double width);
/// (-(c + floor(w/2) + floor(0.25w)), -(c - floor(w/2))), applied to -I.
WindowBounds inverted_window_bounds(double center, double width);

/// Linear window mapping into [0,1] with clipping. Requires both window
/// parameters and width > 0.
RawImage window_rescale(const RawImage& img);
/// Negates intensities, then applies inverted_window_bounds.
RawImage invert_window_rescale(const RawImage& img);

struct ClaheOptions {
  int grid = 8;             // tiles per axis
  int bins = 256;
  double clip_limit = 0.01; // fraction of tile pixel count, per bin
};

struct ClaheTiling {
  int grid_x;
  int grid_y;
  int tile_w;
  int tile_h;
};

ClaheTiling clahe_tiling(int width, int height, const ClaheOptions& opts = {});

using ToneLut = std::array<std::uint8_t, 256>;

/// One lookup table per tile, row-major over the tile grid. Tiles that
/// overhang the image are filled by edge replication before the histogram
/// is taken.
std::vector<ToneLut> clahe_tile_mappings(const GrayImage& img, const ClaheOptions& opts = {});

/// Contrast-limited adaptive histogram equalization with bilinear blending
/// between neighbouring tile mappings. Image must be at least grid x grid.
GrayImage clahe(const GrayImage& img, const ClaheOptions& opts = {});

/// Mirrors left-breast samples about the vertical axis and re-tags them
/// as right; right samples pass through.
AnnotatedSample flip_if_left(const AnnotatedSample& sample);

enum class PreprocessStep {
  window_rescale,
  invert_window_rescale,
  percentile_normalize,
  clahe,
  rescale_0_255,
  flip_if_left,
};

std::string_view to_string(PreprocessStep s);

struct PipelineSpec {
  Vendor vendor = Vendor::ge;
  std::vector<PreprocessStep> steps;
  ClaheOptions clahe;
  double low_percentile = 2.0;
  double high_percentile = 98.0;

  static PipelineSpec for_vendor(Vendor v);
};

struct SampleInfo {
  Vendor vendor = Vendor::ge;
  Laterality laterality = Laterality::right;
  View view = View::mlo;
  std::optional<double> spacing_m;
};

struct PipelineResult {
  AnnotatedSample sample;
  bool degenerate = false;
};

/// Runs the steps in order over a real-valued working image. Windowing and
/// normalization produce [0,1] intensities, which are scaled by 255 and
/// quantized wherever an 8-bit image is needed (clahe input, final output).
/// rescale_0_255 is a min-max stretch onto [0,255]. Missing labels become an
/// all-background map.
PipelineResult run_pipeline(const RawImage& raw, const PipelineSpec& spec,
                            const SampleInfo& info,
                            const std::optional<LabelMap>& labels = std::nullopt);

}  // namespace mammopipe
