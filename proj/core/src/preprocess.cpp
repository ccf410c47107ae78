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

#include "mammopipe/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mammopipe/percentile.hpp"

namespace mammopipe {

namespace {

RawImage linear_window(const RawImage& img, WindowBounds b) {
  RawImage out(img.width(), img.height(), 0.0);
  out.window_center = img.window_center;
  out.window_width = img.window_width;
  const double span = b.x_max - b.x_min;
  for (std::size_t i = 0; i < img.size(); ++i) {
    out[i] = std::clamp((img[i] - b.x_min) / span, 0.0, 1.0);
  }
  return out;
}

void require_window(const RawImage& img) {
  if (!img.window_center || !img.window_width) {
    throw std::invalid_argument("windowing requires window_center and window_width");
  }
  if (!(*img.window_width > 0.0)) {
    throw std::invalid_argument("window_width must be > 0");
  }
}

template <typename T>
Grid<T> mirror_columns(const Grid<T>& g) {
  Grid<T> out = g;
  const int w = g.width();
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x < w; ++x) out.at(x, y) = g.at(w - 1 - x, y);
  }
  return out;
}

// Histogram of one tile of the edge-replicated padded image.
std::vector<int> tile_histogram(const GrayImage& img, const ClaheTiling& t, int tx, int ty,
                                int bins) {
  std::vector<int> hist(static_cast<std::size_t>(bins), 0);
  const int x0 = tx * t.tile_w;
  const int y0 = ty * t.tile_h;
  for (int y = y0; y < y0 + t.tile_h; ++y) {
    const int sy = std::min(y, img.height() - 1);
    for (int x = x0; x < x0 + t.tile_w; ++x) {
      const int sx = std::min(x, img.width() - 1);
      const int v = img.at(sx, sy);
      ++hist[static_cast<std::size_t>(v * bins / 256)];
    }
  }
  return hist;
}

void clip_and_redistribute(std::vector<int>& hist, int limit) {
  const int bins = static_cast<int>(hist.size());
  long excess = 0;
  for (int& h : hist) {
    if (h > limit) {
      excess += h - limit;
      h = limit;
    }
  }
  const long batch = excess / bins;
  long residual = excess - batch * bins;
  for (int& h : hist) h += static_cast<int>(batch);
  if (residual > 0) {
    const int step = std::max(bins / static_cast<int>(residual), 1);
    for (int i = 0; i < bins && residual > 0; i += step, --residual) ++hist[static_cast<std::size_t>(i)];
  }
}

}  // namespace

NormalizeResult percentile_normalize(const RawImage& img, double lo_pct, double hi_pct) {
  if (img.empty()) throw std::invalid_argument("percentile_normalize: empty image");
  std::vector<double> values(img.data());
  const double lo = percentile_inplace(values, lo_pct);
  const double hi = percentile_inplace(values, hi_pct);

  NormalizeResult res{RawImage(img.width(), img.height(), 0.0), false};
  res.image.window_center = img.window_center;
  res.image.window_width = img.window_width;
  if (!(hi > lo)) {
    res.degenerate = true;
    return res;
  }
  const double span = hi - lo;
  for (std::size_t i = 0; i < img.size(); ++i) {
    res.image[i] = std::clamp((img[i] - lo) / span, 0.0, 1.0);
  }
  return res;
}

WindowBounds window_bounds(double center, double width) {
  const double half = std::floor(width / 2.0);
  const double quarter = std::floor(0.25 * width);
  return {center - half - quarter, center + half};
}

WindowBounds inverted_window_bounds(double center, double width) {
  const double half = std::floor(width / 2.0);
  const double quarter = std::floor(0.25 * width);
  return {-(center + half + quarter), -(center - half)};
}

RawImage window_rescale(const RawImage& img) {
  require_window(img);
  return linear_window(img, window_bounds(*img.window_center, *img.window_width));
}

RawImage invert_window_rescale(const RawImage& img) {
  require_window(img);
  RawImage neg = img;
  for (double& v : neg.pixels()) v = -v;
  return linear_window(neg, inverted_window_bounds(*img.window_center, *img.window_width));
}

ClaheTiling clahe_tiling(int width, int height, const ClaheOptions& opts) {
  if (opts.grid < 1) throw std::invalid_argument("clahe grid must be >= 1");
  if (width < opts.grid || height < opts.grid) {
    throw std::invalid_argument("clahe: image smaller than " + std::to_string(opts.grid) + "x" +
                                std::to_string(opts.grid));
  }
  return {opts.grid, opts.grid, (width + opts.grid - 1) / opts.grid,
          (height + opts.grid - 1) / opts.grid};
}

std::vector<ToneLut> clahe_tile_mappings(const GrayImage& img, const ClaheOptions& opts) {
  const ClaheTiling t = clahe_tiling(img.width(), img.height(), opts);
  if (opts.bins < 1 || opts.bins > 256) throw std::invalid_argument("clahe bins must be in 1..256");
  const int tile_px = t.tile_w * t.tile_h;
  const int limit = std::max(1, static_cast<int>(opts.clip_limit * tile_px));
  const double scale = 255.0 / tile_px;

  std::vector<ToneLut> luts;
  luts.reserve(static_cast<std::size_t>(t.grid_x * t.grid_y));
  for (int ty = 0; ty < t.grid_y; ++ty) {
    for (int tx = 0; tx < t.grid_x; ++tx) {
      auto hist = tile_histogram(img, t, tx, ty, opts.bins);
      if (opts.clip_limit > 0.0) clip_and_redistribute(hist, limit);

      std::vector<std::uint8_t> bin_lut(hist.size());
      long cum = 0;
      for (std::size_t b = 0; b < hist.size(); ++b) {
        cum += hist[b];
        bin_lut[b] = quantize_u8(static_cast<double>(cum) * scale);
      }
      ToneLut lut{};
      for (int v = 0; v < 256; ++v) lut[static_cast<std::size_t>(v)] = bin_lut[static_cast<std::size_t>(v * opts.bins / 256)];
      luts.push_back(lut);
    }
  }
  return luts;
}

GrayImage clahe(const GrayImage& img, const ClaheOptions& opts) {
  const ClaheTiling t = clahe_tiling(img.width(), img.height(), opts);
  const auto luts = clahe_tile_mappings(img, opts);
  auto lut_at = [&](int tx, int ty) -> const ToneLut& {
    return luts[static_cast<std::size_t>(ty * t.grid_x + tx)];
  };

  GrayImage out(img.width(), img.height(), 0);
  out.spacing_m = img.spacing_m;
  for (int y = 0; y < img.height(); ++y) {
    const double tyf = (y + 0.5) / t.tile_h - 0.5;
    int ty1 = static_cast<int>(std::floor(tyf));
    int ty2 = ty1 + 1;
    const double ya = tyf - ty1;
    ty1 = std::max(ty1, 0);
    ty2 = std::min(ty2, t.grid_y - 1);
    for (int x = 0; x < img.width(); ++x) {
      const double txf = (x + 0.5) / t.tile_w - 0.5;
      int tx1 = static_cast<int>(std::floor(txf));
      int tx2 = tx1 + 1;
      const double xa = txf - tx1;
      tx1 = std::max(tx1, 0);
      tx2 = std::min(tx2, t.grid_x - 1);

      const auto v = static_cast<std::size_t>(img.at(x, y));
      const double top = lut_at(tx1, ty1)[v] * (1.0 - xa) + lut_at(tx2, ty1)[v] * xa;
      const double bottom = lut_at(tx1, ty2)[v] * (1.0 - xa) + lut_at(tx2, ty2)[v] * xa;
      out.at(x, y) = quantize_u8(top * (1.0 - ya) + bottom * ya);
    }
  }
  return out;
}

AnnotatedSample flip_if_left(const AnnotatedSample& sample) {
  sample.validate();
  if (sample.laterality != Laterality::left) return sample;
  AnnotatedSample out = sample;
  static_cast<Grid<std::uint8_t>&>(out.image) = mirror_columns<std::uint8_t>(sample.image);
  static_cast<Grid<ClassId>&>(out.labels) = mirror_columns<ClassId>(sample.labels);
  out.laterality = Laterality::right;
  return out;
}

std::string_view to_string(PreprocessStep s) {
  switch (s) {
    case PreprocessStep::window_rescale: return "window_rescale";
    case PreprocessStep::invert_window_rescale: return "invert_window_rescale";
    case PreprocessStep::percentile_normalize: return "percentile_normalize";
    case PreprocessStep::clahe: return "clahe";
    case PreprocessStep::rescale_0_255: return "rescale_0_255";
    case PreprocessStep::flip_if_left: return "flip_if_left";
  }
  return "unknown";
}

PipelineSpec PipelineSpec::for_vendor(Vendor v) {
  PipelineSpec spec;
  spec.vendor = v;
  if (v == Vendor::ims) spec.steps.push_back(PreprocessStep::window_rescale);
  if (v == Vendor::planmed) spec.steps.push_back(PreprocessStep::invert_window_rescale);
  spec.steps.insert(spec.steps.end(),
                    {PreprocessStep::percentile_normalize, PreprocessStep::clahe,
                     PreprocessStep::rescale_0_255, PreprocessStep::flip_if_left});
  return spec;
}

PipelineResult run_pipeline(const RawImage& raw, const PipelineSpec& spec,
                            const SampleInfo& info, const std::optional<LabelMap>& labels) {
  if (raw.empty()) throw std::invalid_argument("run_pipeline: empty image");
  if (labels && !labels->same_shape(raw)) {
    throw std::invalid_argument("run_pipeline: label map dimensions differ from image");
  }

  RawImage work = raw;
  bool unit_scale = false;  // true once values live in [0,1]
  bool degenerate = false;
  LabelMap lab = labels ? *labels : LabelMap(raw.width(), raw.height());
  Laterality laterality = info.laterality;

  auto to_gray = [&](const RawImage& r) {
    GrayImage g(r.width(), r.height(), 0);
    const double k = unit_scale ? 255.0 : 1.0;
    for (std::size_t i = 0; i < r.size(); ++i) g[i] = quantize_u8(r[i] * k);
    return g;
  };

  for (PreprocessStep step : spec.steps) {
    switch (step) {
      case PreprocessStep::window_rescale:
        work = window_rescale(work);
        unit_scale = true;
        break;
      case PreprocessStep::invert_window_rescale:
        work = invert_window_rescale(work);
        unit_scale = true;
        break;
      case PreprocessStep::percentile_normalize: {
        auto r = percentile_normalize(work, spec.low_percentile, spec.high_percentile);
        degenerate = degenerate || r.degenerate;
        work = std::move(r.image);
        unit_scale = true;
        break;
      }
      case PreprocessStep::clahe: {
        const GrayImage eq = clahe(to_gray(work), spec.clahe);
        for (std::size_t i = 0; i < eq.size(); ++i) work[i] = eq[i];
        unit_scale = false;
        break;
      }
      case PreprocessStep::rescale_0_255: {
        const auto [mn, mx] = std::minmax_element(work.data().begin(), work.data().end());
        const double lo = *mn;
        const double span = *mx - *mn;
        for (double& v : work.pixels()) v = span > 0.0 ? (v - lo) / span * 255.0 : 0.0;
        unit_scale = false;
        break;
      }
      case PreprocessStep::flip_if_left:
        if (laterality == Laterality::left) {
          static_cast<Grid<double>&>(work) = mirror_columns<double>(work);
          static_cast<Grid<ClassId>&>(lab) = mirror_columns<ClassId>(lab);
          laterality = Laterality::right;
        }
        break;
    }
  }

  PipelineResult res;
  res.degenerate = degenerate;
  res.sample.image = to_gray(work);
  res.sample.image.spacing_m = info.spacing_m;
  res.sample.labels = std::move(lab);
  res.sample.vendor = info.vendor;
  res.sample.laterality = laterality;
  res.sample.view = info.view;
  return res;
}

}  // namespace mammopipe
